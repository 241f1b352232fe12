/*
 * Copyright 2026 The faultlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// faultlab: run fault-injection sweeps, summarize their CSV output, and query
// the analytic error predictors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "faultlab/faultlab.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTrial = 3;

int cmd_run(const std::string& config_path, const std::optional<std::string>& profile,
            const std::optional<std::size_t>& workers, const std::optional<std::string>& out_path) {
  faultlab::ExperimentConfig cfg = faultlab::load_config(config_path);
  if (profile) cfg.apply_profile(*profile);
  if (workers) cfg.workers = *workers;
  if (out_path) cfg.output_path = *out_path;
  cfg.finalize();

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!cfg.output_path.empty() && cfg.output_path != "-") {
    file.open(cfg.output_path);
    if (!file) throw faultlab::ConfigError("cannot write " + cfg.output_path);
    os = &file;
  }
  *os << faultlab::kCsvHeader << '\n';
  std::size_t rows = 0;
  faultlab::run_experiment(cfg, [&](const faultlab::TrialRecord& r) {
    *os << faultlab::to_csv_row(r) << '\n';
    ++rows;
  });
  os->flush();
  if (os != &std::cout) std::cerr << "wrote " << rows << " records to " << cfg.output_path << '\n';
  return 0;
}

int cmd_summarize(const std::string& in_path, double tau) {
  std::ifstream in(in_path);
  if (!in) throw faultlab::ConfigError("cannot open " + in_path);
  const auto records = faultlab::read_csv(in);
  faultlab::write_summary(std::cout, faultlab::summarize(records, tau));
  return 0;
}

int cmd_predict(std::size_t n, int delta_log2, std::size_t coeff, int bit, std::optional<std::size_t> slots,
                int q0_bits, std::size_t limbs, std::size_t limb) {
  const faultlab::EncodingContext enc(n, slots.value_or(n / 2), delta_log2);
  const double l2 = faultlab::predict_l2_norm(coeff, bit, enc);
  std::printf("coeff=%zu bit=%d gap=%zu structural=%d\n", coeff, bit, enc.gap(), enc.is_structural(coeff) ? 1 : 0);
  std::printf("l2=%.17g\n", l2);
  if (limbs > 1) {
    const faultlab::LimbChain chain = faultlab::build_chain(q0_bits, limbs, n);
    const faultlab::BigInt err = faultlab::predict_rns_error(faultlab::BigInt(1) << bit, limb, chain);
    const double unit = faultlab::predict_l2_norm(coeff, 0, enc);
    const long double mag = boost::multiprecision::abs(err).convert_to<long double>();
    std::cout << "rns_error=" << err << '\n';
    std::printf("rns_error_bits=%d\n", faultlab::bit_length(faultlab::BigInt(boost::multiprecision::abs(err))));
    std::printf("rns_l2=%.17Lg\n", mag * static_cast<long double>(unit));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CKKS client pipeline fault-injection harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a fault-injection experiment and write CSV records");
  std::string config_path;
  std::optional<std::string> profile, out_path;
  std::optional<std::size_t> workers;
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--profile", profile, "Seed grid: ci (4x4) or paper (100x25)")
      ->check(CLI::IsMember({"ci", "paper"}));
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

  auto* summarize = app.add_subcommand("summarize", "Category percentages and robust-bit counts from a CSV");
  std::string in_path;
  double tau = faultlab::kDefaultTau;
  summarize->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  summarize->add_option("--tau", tau, "l2 threshold for the onset bit");

  auto* predict = app.add_subcommand("predict", "Analytic decode error of a single bit flip");
  std::size_t n = 0, coeff = 0, limbs = 1, limb = 0;
  int delta_log2 = 0, bit = 0, q0_bits = 60;
  std::optional<std::size_t> slots;
  predict->add_option("--N", n, "Ring dimension")->required();
  predict->add_option("--delta", delta_log2, "log2 of the scaling factor")->required();
  predict->add_option("--coeff", coeff, "Coefficient index")->required();
  predict->add_option("--bit", bit, "Bit index")->required();
  predict->add_option("--slots", slots, "Packed slots (default N/2)");
  predict->add_option("--q0-bits", q0_bits, "Limb bit length for the RNS predictor");
  predict->add_option("--limbs", limbs, "Limb count; > 1 also prints the CRT error");
  predict->add_option("--limb", limb, "Limb holding the flipped residue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, profile, workers, out_path);
    if (*summarize) return cmd_summarize(in_path, tau);
    return cmd_predict(n, delta_log2, coeff, bit, slots, q0_bits, limbs, limb);
  } catch (const faultlab::TrialFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTrial;
  } catch (const faultlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const faultlab::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const faultlab::CapacityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTrial;
  }
}
