#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "gctm/corpus.hpp"
#include "gctm/util.hpp"
#include "temp_dir.hpp"

using namespace gctm;
using testutil::TempDir;

TEST_CASE("load_vocabulary basics") {
  TempDir tmp;
  const auto path = tmp.file("vocab.txt", "apple\nball\n");
  const Vocabulary v = load_vocabulary(path);
  CHECK(v.size() == 2);
  CHECK(v.tokens[0] == "apple");
  CHECK(v.tokens[1] == "ball");
}

TEST_CASE("load_vocabulary rejects duplicates naming both lines") {
  TempDir tmp;
  const auto path = tmp.file("vocab.txt", "a\na\n");
  CHECK_THROWS_WITH_AS(load_vocabulary(path), doctest::Contains("duplicate token \"a\""),
                       std::runtime_error);
  try {
    load_vocabulary(path);
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":1:") != std::string::npos);      // offending line
    CHECK(msg.find("line 0") != std::string::npos);   // first occurrence
  }
}

TEST_CASE("load_vocabulary rejects an empty file") {
  TempDir tmp;
  const auto path = tmp.file("vocab.txt", "");
  CHECK_THROWS_WITH_AS(load_vocabulary(path), doctest::Contains("empty vocabulary"),
                       std::runtime_error);
}

TEST_CASE("load_vocabulary rejects interior blank lines") {
  TempDir tmp;
  const auto path = tmp.file("vocab.txt", "a\n\nb\n");
  CHECK_THROWS_WITH_AS(load_vocabulary(path), doctest::Contains("blank line"),
                       std::runtime_error);
}

TEST_CASE("load_corpus parses labels, timestamps and counts") {
  TempDir tmp;
  const auto vocab_path = tmp.file("vocab.txt", "a\nb\nc\nd\ne\n");
  const Vocabulary v = load_vocabulary(vocab_path);
  const auto corpus_path = tmp.file("corpus.txt", "news\t200501\t0:2 3:1\n-\t-\t1:1\n");
  const auto docs = load_corpus(corpus_path, v);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].label.value() == "news");
  CHECK(docs[0].timestamp.value() == 200501);
  CHECK(docs[0].length() == 3);
  CHECK(docs[0].counts == std::vector<std::pair<int, int>>{{0, 2}, {3, 1}});
  CHECK_FALSE(docs[1].label.has_value());
  CHECK_FALSE(docs[1].timestamp.has_value());
  CHECK(docs[1].counts == std::vector<std::pair<int, int>>{{1, 1}});
}

TEST_CASE("load_corpus rejects bad input with the line number") {
  TempDir tmp;
  const Vocabulary v = load_vocabulary(tmp.file("vocab.txt", "a\nb\nc\nd\ne\n"));
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c1.txt", "-\t-\t9:1\n"), v),
                       doctest::Contains("term id 9 out of range"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c2.txt", "-\t-\t1:0\n"), v),
                       doctest::Contains("count must be positive"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c3.txt", "-\t-\t1:\n"), v),
                       doctest::Contains("malformed pair"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c4.txt", "-\t-\tnope\n"), v),
                       doctest::Contains("malformed pair"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c5.txt", "-\t-\t\n"), v),
                       doctest::Contains("no words"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c6.txt", "x\tnotanumber\t0:1\n"), v),
                       doctest::Contains("bad timestamp"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("c7.txt", "-\t-\t0:1 0:2\n"), v),
                       doctest::Contains("duplicate term id"), std::runtime_error);
}

TEST_CASE("split_holdout single-term document") {
  Document d;
  d.counts = {{0, 5}};
  std::mt19937_64 rng(7);
  const HoldoutSplit s = split_holdout(d, 0.8, rng);
  CHECK(s.obs.counts == std::vector<std::pair<int, int>>{{0, 4}});
  CHECK(s.ho.counts == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("split_holdout partitions the token multiset") {
  Document d;
  d.counts = {{0, 2}, {1, 2}, {2, 1}};
  std::mt19937_64 rng(123);
  const HoldoutSplit s = split_holdout(d, 0.8, rng);
  CHECK(s.obs.length() == 4);
  CHECK(s.ho.length() == 1);
  std::map<int, int> total;
  for (const auto& [v, c] : s.obs.counts) total[v] += c;
  for (const auto& [v, c] : s.ho.counts) total[v] += c;
  for (const auto& [v, c] : d.counts) {
    CHECK(total[v] == c);
  }
}

TEST_CASE("split_holdout rejects short documents") {
  Document d;
  d.counts = {{0, 3}};
  std::mt19937_64 rng(1);
  CHECK_THROWS_WITH_AS(split_holdout(d, 0.8, rng), doctest::Contains("at least 5"),
                       std::runtime_error);
}

TEST_CASE("split_holdout token conservation over random documents") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 50; ++trial) {
    Document d;
    const int terms = 1 + static_cast<int>(uniform_index(gen, 6));
    for (int t = 0; t < terms; ++t) {
      d.counts.emplace_back(t, 1 + static_cast<int>(uniform_index(gen, 4)));
    }
    if (d.length() < 5) d.counts.emplace_back(terms, 5);
    std::mt19937_64 rng(trial);
    const HoldoutSplit s = split_holdout(d, 0.8, rng);
    std::map<int, int> total;
    for (const auto& [v, c] : s.obs.counts) total[v] += c;
    for (const auto& [v, c] : s.ho.counts) total[v] += c;
    std::map<int, int> want(d.counts.begin(), d.counts.end());
    CHECK(total == want);
    CHECK(s.ho.length() >= 1);
    CHECK(s.obs.length() >= 1);
  }
}

TEST_CASE("split_holdout is deterministic under a fixed seed") {
  Document d;
  d.counts = {{0, 3}, {1, 4}, {2, 2}};
  std::mt19937_64 a(5), b(5);
  const HoldoutSplit s1 = split_holdout(d, 0.8, a);
  const HoldoutSplit s2 = split_holdout(d, 0.8, b);
  CHECK(s1.obs.counts == s2.obs.counts);
  CHECK(s1.ho.counts == s2.ho.counts);
}

namespace {

std::vector<Document> numbered_docs(int n) {
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    Document d;
    d.counts = {{i, 1}};
    docs.push_back(d);
  }
  return docs;
}

}  // namespace

TEST_CASE("stream_fixed chunk sizes and partition") {
  std::mt19937_64 rng(3);
  const auto mbs = stream_fixed(numbered_docs(10), 4, rng);
  REQUIRE(mbs.size() == 3);
  CHECK(mbs[0].docs.size() == 4);
  CHECK(mbs[1].docs.size() == 4);
  CHECK(mbs[2].docs.size() == 2);
  CHECK(mbs[0].index == 0);
  CHECK(mbs[2].index == 2);
  std::set<int> seen;
  for (const auto& mb : mbs)
    for (const auto& d : mb.docs) seen.insert(d.counts[0].first);
  CHECK(seen.size() == 10);  // every document exactly once
}

TEST_CASE("stream_fixed single batch and empty input") {
  std::mt19937_64 rng(3);
  const auto one = stream_fixed(numbered_docs(4), 4, rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0].index == 0);
  const auto none = stream_fixed({}, 4, rng);
  CHECK(none.empty());
}

TEST_CASE("stream_fixed is deterministic under a fixed seed") {
  std::mt19937_64 a(17), b(17);
  const auto m1 = stream_fixed(numbered_docs(9), 2, a);
  const auto m2 = stream_fixed(numbered_docs(9), 2, b);
  REQUIRE(m1.size() == m2.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    REQUIRE(m1[i].docs.size() == m2[i].docs.size());
    for (std::size_t j = 0; j < m1[i].docs.size(); ++j) {
      CHECK(m1[i].docs[j].counts == m2[i].docs[j].counts);
    }
  }
}

TEST_CASE("stream_timestamp groups by month ascending") {
  std::vector<Document> docs = numbered_docs(3);
  docs[0].timestamp = 200501;
  docs[1].timestamp = 200501;
  docs[2].timestamp = 200502;
  const auto mbs = stream_timestamp(docs);
  REQUIRE(mbs.size() == 2);
  CHECK(mbs[0].docs.size() == 2);
  CHECK(mbs[1].docs.size() == 1);
  // within a minibatch: file order
  CHECK(mbs[0].docs[0].counts[0].first == 0);
  CHECK(mbs[0].docs[1].counts[0].first == 1);

  for (auto& d : docs) d.timestamp = 7;
  CHECK(stream_timestamp(docs).size() == 1);

  docs[1].timestamp.reset();
  CHECK_THROWS_WITH_AS(stream_timestamp(docs), doctest::Contains("no timestamp"),
                       std::runtime_error);
}

TEST_CASE("split_holdout sizes follow the half-up rounding for any ratio") {
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 60; ++trial) {
    Document d;
    const int terms = 1 + static_cast<int>(uniform_index(gen, 5));
    for (int t = 0; t < terms; ++t) {
      d.counts.emplace_back(t, 1 + static_cast<int>(uniform_index(gen, 5)));
    }
    if (d.length() < 5) d.counts.emplace_back(terms, 5);
    const int n = d.length();
    const double ratio = 0.02 + 0.96 * (trial / 60.0);
    std::mt19937_64 rng(trial);
    const HoldoutSplit s = split_holdout(d, ratio, rng);
    int expect_obs = static_cast<int>(std::floor(ratio * n + 0.5));
    expect_obs = std::min(expect_obs, n - 1);
    expect_obs = std::max(expect_obs, 1);
    CHECK(s.obs.length() == expect_obs);
    CHECK(s.ho.length() == n - expect_obs);
  }
}

TEST_CASE("every scenario partitions the input documents exactly once") {
  std::mt19937_64 gen(1618);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(gen, 40));
    const int batch = 1 + static_cast<int>(uniform_index(gen, 7));
    std::vector<Document> docs = numbered_docs(n);
    for (int i = 0; i < n; ++i) {
      docs[i].timestamp = 1000 + static_cast<int>(uniform_index(gen, 4));
      docs[i].label = uniform_index(gen, 2) == 0 ? "a" : "b";
    }
    auto check_partition = [&](const std::vector<Minibatch>& mbs) {
      std::multiset<int> seen;
      int index = 0;
      for (const auto& mb : mbs) {
        CHECK(mb.index == index++);
        CHECK(!mb.docs.empty());
        for (const auto& d : mb.docs) seen.insert(d.counts[0].first);
      }
      CHECK(seen.size() == static_cast<std::size_t>(n));
      CHECK(std::set<int>(seen.begin(), seen.end()).size() == static_cast<std::size_t>(n));
    };
    std::mt19937_64 rng(trial);
    check_partition(stream_fixed(docs, batch, rng));
    check_partition(stream_timestamp(docs));
    check_partition(stream_by_label(docs, {"b", "a"}, batch));
  }
}

TEST_CASE("stream_by_label follows the label order") {
  std::vector<Document> docs = numbered_docs(5);
  docs[0].label = "a";
  docs[1].label = "a";
  docs[2].label = "a";
  docs[3].label = "b";
  docs[4].label = "b";

  const auto mbs = stream_by_label(docs, {"a", "b"}, 2);
  REQUIRE(mbs.size() == 3);
  CHECK(mbs[0].docs.size() == 2);
  CHECK(mbs[1].docs.size() == 1);
  CHECK(mbs[2].docs.size() == 2);
  CHECK(mbs[0].docs[0].label.value() == "a");
  CHECK(mbs[1].docs[0].label.value() == "a");
  CHECK(mbs[2].docs[0].label.value() == "b");
  CHECK(mbs[0].index == 0);
  CHECK(mbs[1].index == 1);
  CHECK(mbs[2].index == 2);  // indices continue globally

  const auto rev = stream_by_label(docs, {"b", "a"}, 2);
  CHECK(rev[0].docs[0].label.value() == "b");

  docs[4].label = "c";
  CHECK_THROWS_WITH_AS(stream_by_label(docs, {"a", "b"}, 2), doctest::Contains("\"c\""),
                       std::runtime_error);
}
