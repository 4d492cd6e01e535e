#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "radlabel/errors.h"
#include "radlabel/sampling.h"
#include "test_util.h"

using namespace radlabel;

namespace {

const LabelSchema &schema() { return LabelSchema::Default(); }

ReportRecord report(const std::string &id, const std::string &patient) {
  return ReportRecord{id, patient, "x", "x", FindingsState::kPresent};
}

LabelVector with(const std::vector<std::string> &positives) {
  LabelVector v = empty_vector(schema());
  for (const std::string &l : positives) v.decisions[l] = true;
  return v;
}

// Synthetic corpus: patients with 1-3 reports, label prevalences between
// roughly 3% and 30%.
std::pair<Corpus, ReferenceLabels> synthetic(int patients, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> prevalence;
  for (std::size_t l = 0; l < schema().labels().size(); ++l) {
    prevalence.push_back(0.03 + 0.27 * u(rng));
  }
  Corpus corpus;
  ReferenceLabels labels;
  for (int p = 0; p < patients; ++p) {
    const int reports = 1 + (rng() % 10 == 0 ? 1 + rng() % 2 : 0);
    for (int r = 0; r < reports; ++r) {
      const std::string id = "P" + std::to_string(p) + "_" + std::to_string(r);
      corpus.reports.push_back(report(id, "P" + std::to_string(p)));
      LabelVector v = empty_vector(schema());
      for (std::size_t l = 0; l < prevalence.size(); ++l) {
        v.decisions[schema().labels()[l]] = u(rng) < prevalence[l];
      }
      labels[id] = v;
    }
  }
  return {corpus, labels};
}

PredictionSet set_of(const std::string &name, const std::map<std::string, LabelVector> &p) {
  PredictionSet s;
  s.labeler_name = name;
  s.predictions = p;
  return s;
}

}  // namespace

TEST_CASE("split keeps patients whole and tracks label frequencies") {
  auto [corpus, labels] = synthetic(1000, 17);
  const SplitAssignment split = stratified_patient_split(corpus, labels, 0.8, 42);
  CHECK(split.report_side.size() == corpus.reports.size());
  for (const ReportRecord &r : corpus.reports) {
    CHECK(split.report_side.at(r.report_id) == split.patient_side.at(r.patient_id));
  }
  CHECK(split.deviations.size() == 15);
  CHECK(split.max_deviation() <= 0.02);

  std::size_t test = 0;
  for (const auto &[id, side] : split.report_side) test += side == Side::kTest;
  CHECK(std::abs(static_cast<double>(test) / corpus.reports.size() - 0.2) < 0.01);

  const SplitAssignment again = stratified_patient_split(corpus, labels, 0.8, 42);
  CHECK(again.report_side == split.report_side);
  const SplitAssignment other = stratified_patient_split(corpus, labels, 0.8, 43);
  CHECK(other.report_side != split.report_side);
}

TEST_CASE("split examples") {
  SUBCASE("four positives over ten patients") {
    Corpus corpus;
    ReferenceLabels labels;
    for (int i = 0; i < 10; ++i) {
      const std::string id = "R" + std::to_string(i);
      corpus.reports.push_back(report(id, "P" + std::to_string(i)));
      labels[id] = i < 4 ? with({"Lung Nodules"}) : with({});
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const SplitAssignment split = stratified_patient_split(corpus, labels, 0.5, seed);
      int train_pos = 0, test_pos = 0, test = 0;
      for (int i = 0; i < 10; ++i) {
        const Side s = split.report_side.at("R" + std::to_string(i));
        test += s == Side::kTest;
        if (i < 4) (s == Side::kTrain ? train_pos : test_pos)++;
      }
      CHECK(train_pos == 2);
      CHECK(test_pos == 2);
      CHECK(test == 5);
    }
  }
  SUBCASE("multi-report patient stays together") {
    Corpus corpus;
    ReferenceLabels labels;
    for (int i = 0; i < 3; ++i) {
      corpus.reports.push_back(report("A" + std::to_string(i), "PA"));
      labels["A" + std::to_string(i)] = with({"Gallstones"});
    }
    for (int i = 0; i < 5; ++i) {
      corpus.reports.push_back(report("B" + std::to_string(i), "PB" + std::to_string(i)));
      labels["B" + std::to_string(i)] = with({});
    }
    const SplitAssignment split = stratified_patient_split(corpus, labels, 0.5, 1);
    CHECK(split.report_side.at("A0") == split.report_side.at("A1"));
    CHECK(split.report_side.at("A1") == split.report_side.at("A2"));
  }
  SUBCASE("single patient warns") {
    Corpus corpus;
    corpus.reports.push_back(report("R", "P"));
    const SplitAssignment split = stratified_patient_split(corpus, {{"R", with({})}}, 0.8, 1);
    CHECK(split.warnings.size() >= 1);
  }
  SUBCASE("contract errors") {
    Corpus corpus;
    corpus.reports.push_back(report("R", "P"));
    CHECK_THROWS_AS(stratified_patient_split(corpus, {}, 0.8, 1), DataError);
    CHECK_THROWS_AS(stratified_patient_split(corpus, {{"R", with({})}}, 1.0, 1), DataError);
  }
}

TEST_CASE("split csv") {
  auto [corpus, labels] = synthetic(20, 2);
  const auto dir = testing::scratch_dir("split_csv");
  const SplitAssignment split = stratified_patient_split(corpus, labels, 0.7, 5);
  write_split_csv(split, corpus, (dir / "split.csv").string());
  const std::string text = testing::read_file(dir / "split.csv");
  CHECK(text.rfind("report_id,patient_id,side\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(corpus.reports.size() + 1));
  write_deviation_csv(split, (dir / "dev.csv").string());
  CHECK(testing::read_file(dir / "dev.csv").rfind("label,overall_rate,test_rate,deviation\n", 0) == 0);
}

TEST_CASE("combination categories") {
  const std::string label = "Lung Atelectasis";
  std::map<std::string, LabelVector> a, b, c;
  for (int pattern = 0; pattern < 8; ++pattern) {
    const std::string id = "R" + std::to_string(pattern);
    a[id] = (pattern & 4) ? with({label}) : with({});
    b[id] = (pattern & 2) ? with({label}) : with({});
    c[id] = (pattern & 1) ? with({label}) : with({});
  }
  PredictionSet sa = set_of("rba", a), sb = set_of("m2", b), sc = set_of("m3", c);
  sc.predictions.erase("R7");
  sc.errors.push_back({"R7", "parse: x"});
  const auto cats = combination_assign({sa, sb, sc}, label);
  CHECK(cats.size() == 7);
  CHECK(cats.at("R0") == 0);
  CHECK(category_letter(cats.at("R0")) == "A");
  CHECK(category_letter(cats.at("R3")) == "D");
  CHECK(cats.at("R5") == 5);
  CHECK(category_letter(7) == "H");
  CHECK(category_letter(30) == "C30");
}

TEST_CASE("disagreement sampler") {
  std::mt19937_64 rng(8);
  std::map<std::string, LabelVector> a, b, c;
  for (int r = 0; r < 200; ++r) {
    const std::string id = "R" + std::to_string(r);
    auto random_vector = [&] {
      LabelVector v = empty_vector(schema());
      for (const std::string &l : schema().labels()) v.decisions[l] = rng() % 5 == 0;
      return v;
    };
    a[id] = random_vector();
    b[id] = random_vector();
    c[id] = rng() % 2 ? a[id] : random_vector();
  }
  const std::vector<PredictionSet> panel = {set_of("a", a), set_of("b", b), set_of("c", c)};

  SUBCASE("partition and prevalence") {
    const DisagreementSample s = sample_disagreement_set(panel, 10, 3);
    CHECK(s.covered == 200);
    REQUIRE(s.category_counts.size() == 15);
    for (const auto &counts : s.category_counts) {
      CHECK(std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 200);
    }
    double total = 0;
    for (const CategoryPrevalence &row : s.prevalence) total += row.average_prevalence;
    CHECK(total == doctest::Approx(100.0));
    CHECK(s.prevalence[3].pattern == std::vector<int>{0, 1, 1});
    CHECK(std::is_sorted(s.report_ids.begin(), s.report_ids.end()));
    CHECK(std::adjacent_find(s.report_ids.begin(), s.report_ids.end()) == s.report_ids.end());
    CHECK(sample_disagreement_set(panel, 10, 3).report_ids == s.report_ids);
    CHECK(sample_disagreement_set(panel, 10, 4).report_ids != s.report_ids);

    // Every sampled id is drawn from a category of some label, and each
    // label/category contributes at most the quota.
    for (std::size_t l = 0; l < 15; ++l) {
      const auto cats = combination_assign(panel, schema().labels()[l]);
      std::vector<int> per_category(8, 0);
      for (const std::string &id : s.report_ids) ++per_category[cats.at(id)];
      for (int cat = 0; cat < 8; ++cat) {
        CHECK(per_category[cat] >= std::min<int>(10, s.category_counts[l][cat]));
      }
    }
  }
  SUBCASE("quota zero and saturating quota") {
    CHECK(sample_disagreement_set(panel, 0, 1).report_ids.empty());
    CHECK(sample_disagreement_set(panel, 1000, 1).report_ids.size() == 200);
  }
}

TEST_CASE("full agreement on the published category table") {
  const auto table =
      read_category_prevalence_csv(testing::source_path("tests/fixtures/category_prevalence.csv"));
  REQUIRE(table.size() == 8);
  CHECK(std::abs(full_agreement_rate(table) - 81.04) <= 0.005);
  double total = 0;
  for (const CategoryPrevalence &row : table) total += row.average_prevalence;
  CHECK(std::abs(total - 100.0) <= 0.01);
  CHECK(table[7].index == 7);

  const auto dir = testing::scratch_dir("category_csv");
  write_category_prevalence_csv(table, {"x", "y", "z"}, (dir / "t.csv").string());
  const auto back = read_category_prevalence_csv((dir / "t.csv").string());
  CHECK(back[0].average_prevalence == doctest::Approx(71.89));
  CHECK(full_agreement_rate(back) == doctest::Approx(81.04));
}

TEST_CASE("random supplement") {
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.push_back("R" + std::to_string(i));
  const std::set<std::string> exclude = {"R1", "R2", "R3"};
  CHECK(random_supplement(ids, exclude, 0, 1).empty());
  const auto all = random_supplement(ids, exclude, 47, 1);
  CHECK(all.size() == 47);
  for (const std::string &id : all) CHECK_FALSE(exclude.count(id));
  const auto some = random_supplement(ids, exclude, 10, 9);
  CHECK(some == random_supplement(ids, exclude, 10, 9));
  CHECK(some != random_supplement(ids, exclude, 10, 10));
  CHECK_THROWS_AS(random_supplement(ids, exclude, 48, 1), DataError);
}
