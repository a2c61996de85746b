#include <doctest.h>

#include <random>
#include <sstream>

#include "safeseg/confusion.hpp"
#include "safeseg/errors.hpp"

#include "worked_fixture.hpp"

using namespace safeseg;

TEST_CASE("accumulate counts the worked fixture") {
  ConfusionMatrix m(4);
  accumulate(m, testutil::worked_gt(), testutil::worked_pred());

  CHECK(m.count(2, 2) == 1);  // person kept
  CHECK(m.count(2, 0) == 1);  // person -> road
  CHECK(m.count(0, 0) == 2);  // road kept
  CHECK(m.total_count() == 4);
  CHECK(m.ignored_pixels() == 0);
  CHECK(m.image_count() == 1);

  SetSizes road = m.set_sizes(0);
  CHECK(road.gt == 2);
  CHECK(road.pred == 3);
  CHECK(road.union_with == 3);

  SetSizes person = m.set_sizes(2);
  CHECK(person.gt == 2);
  CHECK(person.pred == 1);
  CHECK(person.union_with == 2);

  SetSizes parking = m.set_sizes(1);
  CHECK(parking.union_with == 0);
}

TEST_CASE("ignored ground truth pixels are only tallied") {
  LabelMap gt(3, 1);
  gt.pixels = {kIgnoreClass, 1, kIgnoreClass};
  LabelMap pred(3, 1);
  pred.pixels = {0, 1, 2};

  ConfusionMatrix m(4);
  accumulate(m, gt, pred);
  CHECK(m.total_count() == 1);
  CHECK(m.count(1, 1) == 1);
  CHECK(m.ignored_pixels() == 2);
}

TEST_CASE("ignore values in predictions") {
  LabelMap gt(2, 1);
  gt.pixels = {1, 2};
  LabelMap pred(2, 1);
  pred.pixels = {1, kIgnoreClass};

  SUBCASE("strict mode rejects them") {
    ConfusionMatrix m(4);
    CHECK_THROWS_AS(accumulate(m, gt, pred), ValidationError);
  }

  SUBCASE("lenient mode remaps to the fallback class") {
    ConfusionMatrix m(4);
    AccumulateOptions options;
    options.strict = false;
    options.lenient_fallback = 0;
    accumulate(m, gt, pred, options);
    CHECK(m.count(2, 0) == 1);
    CHECK(m.count(1, 1) == 1);
  }
}

TEST_CASE("accumulate validates shapes and ranges") {
  ConfusionMatrix m(4);
  LabelMap gt(2, 2);
  LabelMap narrow(1, 2);
  CHECK_THROWS_AS(accumulate(m, gt, narrow), ValidationError);

  LabelMap out_of_range(2, 2);
  out_of_range.pixels = {0, 1, 9, 0};  // only 4 classes exist
  LabelMap ok(2, 2);
  CHECK_THROWS_AS(accumulate(m, out_of_range, ok), ValidationError);
  CHECK_THROWS_AS(accumulate(m, ok, out_of_range), ValidationError);
}

TEST_CASE("any partition of the images merges to the same totals") {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> label(0, 5);

  // 40 small random images accumulated whole vs. in three random shards.
  std::vector<std::pair<LabelMap, LabelMap>> images;
  for (int i = 0; i < 40; ++i) {
    LabelMap gt(7, 5), pred(7, 5);
    for (auto& p : gt.pixels) p = std::uint16_t(label(rng));
    for (auto& p : pred.pixels) p = std::uint16_t(label(rng));
    images.emplace_back(std::move(gt), std::move(pred));
  }

  ConfusionMatrix whole(6);
  for (const auto& [gt, pred] : images) accumulate(whole, gt, pred);

  std::uniform_int_distribution<int> shard_of(0, 2);
  ConfusionMatrix shards[3] = {ConfusionMatrix(6), ConfusionMatrix(6),
                               ConfusionMatrix(6)};
  for (const auto& [gt, pred] : images)
    accumulate(shards[shard_of(rng)], gt, pred);

  // Merge in a scrambled order; integer addition makes order irrelevant.
  ConfusionMatrix merged(6);
  merged.merge(shards[2]);
  merged.merge(shards[0]);
  merged.merge(shards[1]);

  CHECK(merged == whole);
  CHECK(merged.image_count() == 40);
}

TEST_CASE("merge rejects mismatched dimensions") {
  ConfusionMatrix a(4), b(5);
  CHECK_THROWS_AS(a.merge(b), ValidationError);
}

TEST_CASE("dump and restore round trip") {
  ConfusionMatrix m(4);
  accumulate(m, testutil::worked_gt(), testutil::worked_pred());

  std::vector<std::string> names = {"road", "parking", "person", "rider"};
  std::ostringstream first;
  m.dump(first, names);

  std::istringstream in(first.str());
  std::vector<std::string> restored_names;
  ConfusionMatrix restored = ConfusionMatrix::from_dump(in, &restored_names);

  CHECK(restored == m);
  CHECK(restored_names == names);

  std::ostringstream second;
  restored.dump(second, restored_names);
  CHECK(second.str() == first.str());
}

TEST_CASE("malformed dumps are rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ConfusionMatrix::from_dump(in);
  };

  CHECK_THROWS_AS(parse(""), ValidationError);
  CHECK_THROWS_AS(parse("bogus\ta\tb\n"), ValidationError);
  // Row too short.
  CHECK_THROWS_AS(parse("classes\ta\tb\na\t1\nb\t1\t2\nignored\t0\nimages\t1\n"),
                  ValidationError);
  // Count is not a number.
  CHECK_THROWS_AS(
      parse("classes\ta\tb\na\t1\tx\nb\t1\t2\nignored\t0\nimages\t1\n"),
      ValidationError);
  // Missing trailers.
  CHECK_THROWS_AS(parse("classes\ta\tb\na\t1\t2\nb\t1\t2\n"), ValidationError);
}
