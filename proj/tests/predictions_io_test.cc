#include "doctest.h"
#include "radlabel/errors.h"
#include "radlabel/predictions_io.h"
#include "test_util.h"

using namespace radlabel;

namespace {

LabelVector vector_with(const std::vector<std::string> &positives) {
  LabelVector v = empty_vector(LabelSchema::Default());
  for (const std::string &label : positives) v.decisions[label] = true;
  return v;
}

}  // namespace

TEST_CASE("predictions round trip") {
  const auto dir = testing::scratch_dir("predictions_io");
  PredictionSet set;
  set.labeler_name = "rba";
  set.predictions["R1"] = vector_with({"Gallstones"});
  set.predictions["R2"] = vector_with({});
  set.predictions["R2"].uncertain["Lungs/Pleura"] = true;
  set.status["R1"] = "rule";
  set.errors.push_back({"R3", "no-findings"});
  const std::string path = (dir / "p.jsonl").string();
  write_predictions(set, path);

  const PredictionSet back = read_predictions(path);
  CHECK(back.labeler_name == "rba");
  CHECK(back.predictions.size() == 2);
  CHECK(back.predictions.at("R1").decisions == set.predictions.at("R1").decisions);
  CHECK(back.predictions.at("R2").is_uncertain("Lungs/Pleura"));
  CHECK(back.status.at("R1") == "rule");
  CHECK(back.status.at("R2") == "ok");
  REQUIRE(back.errors.size() == 1);
  CHECK(back.errors[0].reason == "no-findings");

  write_predictions(back, (dir / "q.jsonl").string());
  CHECK(testing::read_file(dir / "q.jsonl") == testing::read_file(path));
}

TEST_CASE("predictions reader rejects bad files") {
  const auto dir = testing::scratch_dir("predictions_bad");
  const std::string row1 = R"({"report_id":"R1","labeler":"a","decisions":{"Gallstones":1}})";
  const std::string row2 = R"({"report_id":"R1","labeler":"a","decisions":{"Gallstones":0}})";
  const std::string row3 = R"({"report_id":"R2","labeler":"b","decisions":{"Gallstones":0}})";
  const std::string row4 = R"({"report_id":"R2","labeler":"a","decisions":{"Gallstones":2}})";
  CHECK(read_predictions(testing::write_file(dir / "ok", row1 + "\n\n"))
            .predictions.at("R1").get("Gallstones"));
  CHECK_THROWS_AS(read_predictions(testing::write_file(dir / "dup", row1 + "\n" + row2)), DataError);
  CHECK_THROWS_AS(read_predictions(testing::write_file(dir / "mix", row1 + "\n" + row3)), DataError);
  CHECK_THROWS_AS(read_predictions(testing::write_file(dir / "bin", row1 + "\n" + row4)), DataError);
  CHECK_THROWS_AS(read_predictions(testing::write_file(dir / "json", "{")), DataError);
  CHECK_THROWS_AS(read_predictions((dir / "absent").string()), DataError);
}

TEST_CASE("reference csv") {
  const auto dir = testing::scratch_dir("reference_csv");
  ReferenceLabels labels = {{"R1", vector_with({"Kidney Cyst", "Normal Lung"})},
                            {"R2", vector_with({})}};
  const std::string path = (dir / "truth.csv").string();
  write_reference_csv(labels, path);
  const ReferenceLabels back = read_reference_csv(path);
  CHECK(back.size() == 2);
  CHECK(back.at("R1").decisions == labels.at("R1").decisions);

  write_reference_csv({}, (dir / "empty.csv").string());
  CHECK(read_reference_csv((dir / "empty.csv").string()).empty());

  const ReferenceLabels subset = read_reference_csv(
      testing::write_file(dir / "lungs.csv", "report_id,Lung Nodules\nA,1\nB,0\n"));
  CHECK(subset.at("A").get("Lung Nodules"));
  CHECK(subset.at("A").decisions.size() == 1);

  CHECK_THROWS_AS(read_reference_csv(testing::write_file(dir / "u.csv", "report_id,Nope\nA,1\n")),
                  DataError);
  CHECK_THROWS_AS(
      read_reference_csv(testing::write_file(dir / "v.csv", "report_id,Lung Nodules\nA,yes\n")),
      DataError);
  CHECK_THROWS_AS(read_reference_csv(
                      testing::write_file(dir / "d.csv", "report_id,Lung Nodules\nA,1\nA,0\n")),
                  DataError);
}
