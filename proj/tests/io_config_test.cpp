// Copyright 2026 The kcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "kcontrol/commands.hpp"
#include "support.hpp"

namespace kcontrol {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::kInvalidArgument;
}

TEST(FormatDoubleTest, RoundTripsExactly) {
  Rng rng(31);
  std::uniform_real_distribution<double> uni(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = uni(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(parse_double(format_double(std::numeric_limits<double>::denorm_min())),
            std::numeric_limits<double>::denorm_min());
}

TEST(FormatDoubleTest, RejectsGarbage) {
  EXPECT_EQ(kind_of([] { parse_double("1.5x"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([] { parse_double(""); }), ErrorKind::kIo);
}

TEST(SampleCsvTest, RoundTripIsBitExact) {
  Rng rng(32);
  const auto sample = generate_sample(SystemSpec::nonholonomic(), vehicle_ranges(), 50, rng);
  std::stringstream ss;
  write_sample_csv(ss, sample, "config_hash=0 seed=1");
  const auto text = ss.str();
  EXPECT_EQ(text.rfind("# config_hash=0 seed=1\nx1,x2,x3,u1,u2,xp1,xp2,xp3\n", 0), 0u);
  const auto back = read_sample_csv(ss);
  EXPECT_EQ(back.states(), sample.states());
  EXPECT_EQ(back.controls(), sample.controls());
  EXPECT_EQ(back.successors(), sample.successors());
}

TEST(SampleCsvTest, HeaderIsValidated) {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_sample_csv(is);
  };
  EXPECT_EQ(kind_of([&] { parse(""); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("# only a comment\n"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("x1,u1,xp2\n0,0,0\n"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("x1,x2,u1,xp1\n0,0,0,0\n"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("x1,u1,xp1\n"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("x1,u1,xp1\n0,0\n"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { parse("x1,u1,xp1\n0,a,0\n"); }), ErrorKind::kIo);
  const auto ok = parse("# c\nx1,u1,xp1\r\n1,2,3\r\n\n# tail\n4,5,6\n");
  EXPECT_EQ(ok.size(), 2);
  EXPECT_EQ(ok.successors()(1, 0), 6.0);
}

TEST(EstimatorJsonTest, RoundTripPreservesPredictions) {
  Rng rng(33);
  const auto sample = testing::linear_gaussian_sample(60, rng);
  const auto est = fit(sample, KernelSpec::gaussian(0.7), KernelSpec::gaussian(1.3));
  const auto back = estimator_from_json(nlohmann::json::parse(estimator_to_json(est).dump()));
  EXPECT_EQ(back.inverse(), est.inverse());
  EXPECT_EQ(back.lambda(), est.lambda());
  EXPECT_EQ(back.kernel_x().bandwidth(), 0.7);
  EXPECT_EQ(back.kernel_u().bandwidth(), 1.3);
  const Vector f = evaluate_at_successors(sample, [](const Vector& y) { return y[0]; });
  for (int k = 0; k < 10; ++k) {
    const Vector x = testing::uniform_matrix(1, 1, -1, 1, rng).col(0);
    const Vector u = testing::uniform_matrix(1, 1, -1, 1, rng).col(0);
    EXPECT_EQ(predict_expectation(back, f, x, u), predict_expectation(est, f, x, u));
  }
}

TEST(EstimatorJsonTest, RejectsBadSnapshots) {
  Rng rng(34);
  const auto est = fit(testing::linear_gaussian_sample(5, rng), KernelSpec::gaussian(1.0),
                       KernelSpec::gaussian(1.0));
  auto j = estimator_to_json(est);
  auto wrong_schema = j;
  wrong_schema["schema"] = "kcontrol.estimator/0";
  EXPECT_EQ(kind_of([&] { estimator_from_json(wrong_schema); }), ErrorKind::kIo);
  auto missing = j;
  missing.erase("inverse");
  EXPECT_EQ(kind_of([&] { estimator_from_json(missing); }), ErrorKind::kIo);
  auto ragged = j;
  ragged["states"][0].push_back(1.0);
  EXPECT_EQ(kind_of([&] { estimator_from_json(ragged); }), ErrorKind::kIo);
}

TEST(ValueTableCsvTest, Layout) {
  const SampleSet sample((Matrix(2, 1) << 0.0, 1.0).finished(),
                         (Matrix(2, 1) << 0.5, 0.5).finished(),
                         (Matrix(2, 1) << 0.25, 1.5).finished());
  std::vector<ValueTable> tables = {{0, (Vector(2) << 1.0, 2.0).finished()},
                                    {1, (Vector(2) << 0.0, -0.5).finished()}};
  std::ostringstream os;
  write_value_tables_csv(os, sample, tables, "c");
  EXPECT_EQ(os.str(), "# c\nt,i,xp1,value\n0,0,0.25,1\n0,1,1.5,2\n1,0,0.25,0\n1,1,1.5,-0.5\n");
  tables[1].values = Vector::Zero(3);
  std::ostringstream bad;
  EXPECT_THROW(write_value_tables_csv(bad, sample, tables), Error);
}

TEST(ConfigTest, PresetsValidateAndRoundTrip) {
  for (const auto& c : {integrator_config(), vehicle_config(),
                        integrator_config(DisturbanceSpec::beta(2.0, 0.5, 0.1)),
                        integrator_config(DisturbanceSpec::exponential(3.0, 0.01))}) {
    EXPECT_NO_THROW(validate_config(c));
    const auto j = config_to_json(c);
    const auto back = config_from_json(nlohmann::json::parse(j.dump()), c);
    EXPECT_EQ(back, c);
    EXPECT_EQ(config_to_json(back), j);
    const auto from_default = config_from_json(j);
    EXPECT_EQ(config_to_json(from_default), j);
  }
}

TEST(ConfigTest, CustomValuesRoundTrip) {
  auto c = vehicle_config();
  c.sample_size = 123;
  c.lambda = 1e-3;
  c.seed = 99;
  c.eval_points = {{0.0, 0.1, 0.2}};
  c.episodes = 4;
  const auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  EXPECT_EQ(back, c);
}

TEST(ConfigTest, PartialOverridesKeepBase) {
  const auto c = config_from_json(nlohmann::json::parse(
      R"({"sample_size": 400, "kernel": {"sigma_x": 2.0}, "seed": 7})"));
  EXPECT_EQ(c.sample_size, 400u);
  EXPECT_EQ(c.sigma_x, 2.0);
  EXPECT_EQ(c.sigma_u, 1.0);
  EXPECT_EQ(c.seed, std::optional<std::uint64_t>(7));
  EXPECT_EQ(c.system, integrator_config().system);
}

TEST(ConfigTest, KindSwitchStartsFromPreset) {
  const auto c = config_from_json(
      nlohmann::json::parse(R"({"system": {"kind": "nonholonomic"}})"), integrator_config());
  EXPECT_EQ(c, vehicle_config());
  const auto d = config_from_json(
      nlohmann::json::parse(R"({"system": {"kind": "double_integrator"}})"), vehicle_config());
  EXPECT_EQ(d, integrator_config());
}

TEST(ConfigTest, InvalidInputsAreConfigErrors) {
  const char* bad[] = {
      R"({"system": {"kind": "pendulum"}})",
      R"({"system": {"disturbance": {"family": "cauchy"}}})",
      R"({"system": {"sampling_time": -1}})",
      R"({"sample_size": 0})",
      R"({"sample_size": "many"})",
      R"({"kernel": {"sigma_x": 0}})",
      R"({"kernel": {"lambda": -1}})",
      R"({"horizon": 0})",
      R"({"grid": {"counts": [10, 10]}})",
      R"({"grid": {"counts": [0]}})",
      R"({"evaluation": {"counts": [5]}})",
      R"({"evaluation": {"points": [[1, 2, 3]]}})",
      R"({"bench": {"repetitions": 2}})",
      R"({"evaluation": {"counts": [3, 0]}})",
      R"({"grid": {"box": [[1, -1]]}})",
  };
  for (const char* text : bad) {
    EXPECT_EQ(kind_of([&] { config_from_json(nlohmann::json::parse(text)); }),
              ErrorKind::kConfig)
        << text;
  }
}

TEST(ConfigTest, HashIgnoresOutputOnly) {
  auto c = integrator_config();
  const auto h = config_hash(c);
  EXPECT_EQ(config_hash(integrator_config()), h);
  c.output = "elsewhere.csv";
  EXPECT_EQ(config_hash(c), h);
  c.sigma_x = 1.5;
  EXPECT_NE(config_hash(c), h);
  EXPECT_NE(config_hash(vehicle_config()), h);
}

TEST(ProvenanceTest, Format) {
  const auto line = provenance(integrator_config(), 42);
  EXPECT_EQ(line.rfind("config_hash=", 0), 0u);
  EXPECT_EQ(line.size(), std::string("config_hash=").size() + 16 + std::string(" seed=42").size());
  EXPECT_NE(line.find(" seed=42"), std::string::npos);
}

ExperimentConfig small_integrator() {
  auto c = integrator_config();
  c.sample_size = 150;
  c.eval_counts = {3, 3};
  c.sweep_sample_sizes = {50, 100};
  c.bench_sample_sizes = {50, 100};
  c.bench_eval_counts = {5, 10};
  return c;
}

TEST(CommandDeterminismTest, SampleAndSweepRepeatExactly) {
  const auto c = small_integrator();
  std::ostringstream a, b;
  sample_command(c, 5, a);
  sample_command(c, 5, b);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream other;
  sample_command(c, 6, other);
  EXPECT_NE(a.str(), other.str());

  std::ostringstream s1, s2;
  error_sweep_command(c, 5, s1);
  error_sweep_command(c, 5, s2);
  EXPECT_EQ(s1.str(), s2.str());
  EXPECT_NE(s1.str().find("\nsample_size,max_sq_error,mean_sq_error\n50,"), std::string::npos);
}

TEST(CommandDeterminismTest, VectorFieldRepeatsExactly) {
  const auto c = small_integrator();
  const auto run = [&] {
    const auto rows = vector_field(c, fit_sample(c, draw_sample(c, c.sample_size,
                                                                derive_seed(5, kSampleStream))),
                                   evaluation_points(c));
    std::ostringstream os;
    write_vector_field_csv(os, rows, provenance(c, 5));
    return os.str();
  };
  const auto text = run();
  EXPECT_EQ(text, run());
  EXPECT_NE(text.find("\nr,x1,x2,u_kernel1,next_kernel1,next_kernel2,u_oracle1,next_oracle1,"
                      "next_oracle2,sq_error\n"),
            std::string::npos);
}

TEST(CommandDeterminismTest, TrackingRepeatsExactlyAndShapesRows) {
  auto c = vehicle_config();
  c.sample_size = 200;
  c.horizon = 4;
  c.grid_counts = {3, 3};
  const auto problem = make_tracking_problem(c, 8);
  for (auto mode : {TrackingMode::kGreedy, TrackingMode::kDp}) {
    std::ostringstream a, b;
    write_tracking_csv(a, problem, run_tracking(problem, mode, 2, 8), "h");
    write_tracking_csv(b, problem, run_tracking(problem, mode, 2, 8), "h");
    EXPECT_EQ(a.str(), b.str());
    std::istringstream lines(a.str());
    std::string line;
    std::vector<std::string> all;
    while (std::getline(lines, line)) all.push_back(line);
    ASSERT_EQ(all.size(), 2u + 2u * 5u);
    EXPECT_EQ(all[1], "episode,t,x1,x2,x3,target1,target2,u1,u2,cost");
    EXPECT_EQ(all[6].rfind("0,4,", 0), 0u);
    EXPECT_NE(all[6].find(",,,"), std::string::npos);
  }
}

TEST(CommandDeterminismTest, BenchAxisColumnIsStable) {
  const auto c = small_integrator();
  std::ostringstream os;
  const auto rows = bench_command(c, BenchAxis::kEvalCount, 5, os);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].axis_value, 5u);
  EXPECT_EQ(rows[1].axis_value, 10u);
  EXPECT_NE(os.str().find("\nR,fit_mean_s,fit_std_s,prepare_mean_s,prepare_std_s,query_mean_s,"
                          "query_std_s\n5,"),
            std::string::npos);
  for (const auto& r : rows) {
    EXPECT_GE(r.fit.mean, 0.0);
    EXPECT_GE(r.query.stddev, 0.0);
  }
}

}  // namespace
}  // namespace kcontrol
