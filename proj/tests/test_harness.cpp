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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "faultlab/harness.hpp"

namespace faultlab {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) os << to_csv_row(r) << '\n';
  return os.str();
}

ExperimentConfig small_config(Mode mode, std::size_t limbs = 1) {
  ExperimentConfig cfg;
  cfg.params.mode = mode;
  cfg.params.ring_dimension = 16;
  cfg.params.slots = 4;
  cfg.params.num_limbs = limbs;
  cfg.faults = {{Stage::PostEncrypt, Target::C0}, {Stage::PostEncrypt, Target::C1}};
  cfg.scheme_seeds = {1, 2};
  cfg.input_seeds = {1};
  return cfg;
}

TEST(Config, ParsesAllKeys) {
  const auto cfg = parse(R"(# comment
mode = rns_ntt
N = 64
q0_bits = 50
limbs = 3
delta_log2 = 30   # trailing comment
slots = 10
hamming_weight = 8
sigma = 3.2
faults = post_encrypt:c0, pre_decode:plaintext
sampling = random:50:7
scheme_seeds = 1..3,9
input_seeds = 5
input_lo = -10
input_hi = 10.5
tau = 0.01
output = out.csv
encryption = secret
fault_domain = stored
audit_interval = 10
workers = 2
)");
  EXPECT_EQ(cfg.params.mode, Mode::RnsNtt);
  EXPECT_EQ(cfg.params.ring_dimension, 64u);
  EXPECT_EQ(cfg.params.q0_bits, 50);
  EXPECT_EQ(cfg.params.num_limbs, 3u);
  EXPECT_EQ(cfg.params.delta_log2, 30);
  EXPECT_EQ(cfg.params.slots, 10u);
  EXPECT_EQ(cfg.params.hamming_weight, 8u);
  EXPECT_EQ(cfg.faults.size(), 2u);
  EXPECT_EQ(cfg.faults[1], StageTarget(Stage::PreDecode, Target::PlaintextPoly));
  EXPECT_EQ(cfg.sampling.kind, Sampling::Kind::RandomSubset);
  EXPECT_EQ(cfg.sampling.count, 50u);
  EXPECT_EQ(cfg.sampling.seed, 7u);
  EXPECT_EQ(cfg.scheme_seeds, (std::vector<std::uint64_t>{1, 2, 3, 9}));
  EXPECT_EQ(cfg.input_seeds, (std::vector<std::uint64_t>{5}));
  EXPECT_EQ(cfg.input_lo, -10.0);
  EXPECT_EQ(cfg.input_hi, 10.5);
  EXPECT_EQ(cfg.tau, 0.01);
  EXPECT_EQ(cfg.output_path, "out.csv");
  EXPECT_EQ(cfg.encryption, Encryption::SecretKey);
  EXPECT_EQ(cfg.fault_domain, FaultDomain::Stored);
  EXPECT_EQ(cfg.audit_interval, 10u);
  EXPECT_EQ(cfg.workers, 2u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("N = 16\nN = 32\n"), ConfigError);
  EXPECT_THROW(parse("N = sixteen\n"), ConfigError);
  EXPECT_THROW(parse("just text\n"), ConfigError);
  EXPECT_THROW(parse("scheme_seeds = 5..2\n"), ConfigError);
  EXPECT_THROW(parse("sampling = some\n"), ConfigError);
  EXPECT_THROW(parse("faults = post_encode:c1\n").finalize(), ConfigError);
  EXPECT_THROW(parse("mode = fast\n"), ConfigError);

  auto lohi = parse("input_lo = 5\ninput_hi = 5\n");
  EXPECT_THROW(lohi.finalize(), ConfigError);
  auto bad = parse("mode = vanilla\nlimbs = 2\n");
  EXPECT_THROW(bad.finalize(), ConfigError);
}

TEST(Config, DefaultsAndProfiles) {
  auto cfg = parse("");
  cfg.finalize();
  EXPECT_EQ(cfg.scheme_seeds.size(), 4u);
  EXPECT_EQ(cfg.input_seeds.size(), 4u);
  EXPECT_EQ(cfg.sampling.kind, Sampling::Kind::Exhaustive);
  cfg.apply_profile("paper");
  EXPECT_EQ(cfg.scheme_seeds.size(), 100u);
  EXPECT_EQ(cfg.input_seeds.size(), 25u);
  EXPECT_THROW(cfg.apply_profile("huge"), ConfigError);
}

TEST(Config, LargeRingGating) {
  auto big = parse("mode = rns\nN = 4096\nslots = 8\nfaults = post_encrypt:c0\n");
  big.finalize();
  EXPECT_EQ(big.sampling.kind, Sampling::Kind::RandomSubset);
  auto forced = parse("mode = rns\nN = 4096\nslots = 8\nfaults = post_encrypt:c0\nsampling = exhaustive\n");
  EXPECT_THROW(forced.finalize(), ConfigError);
  auto allowed = parse("mode = rns\nN = 4096\nslots = 8\nfaults = post_encrypt:c0\nsampling = exhaustive\n"
                       "allow_exhaustive = true\n");
  EXPECT_NO_THROW(allowed.finalize());
}

TEST(Config, FileInput) {
  const auto dir = std::filesystem::temp_directory_path() / "faultlab_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream v(dir / "vec.txt");
    v << "1.5\n\n2.5 # second\n3\n4\n";
    std::ofstream c(dir / "exp.conf");
    c << "slots = 4\ninput_source = file:vec.txt\n";
  }
  auto cfg = load_config(dir / "exp.conf");
  cfg.finalize();
  EXPECT_EQ(cfg.input_source, InputSource::FileVector);
  EXPECT_EQ(make_input(cfg, 1), (std::vector<double>{1.5, 2.5, 3.0, 4.0}));
  cfg.params.slots = 5;
  EXPECT_THROW(make_input(cfg, 1), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.conf"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(FAULTLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".conf") continue;
    auto cfg = load_config(entry.path());
    EXPECT_NO_THROW(cfg.finalize()) << entry.path();
  }
}

TEST(Input, UniformInRange) {
  ExperimentConfig cfg;
  cfg.params.slots = 8;
  cfg.input_lo = 512;
  cfg.input_hi = 1024;
  const auto a = make_input(cfg, 3), b = make_input(cfg, 3), c = make_input(cfg, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (double x : a) {
    EXPECT_GE(x, 512.0);
    EXPECT_LT(x, 1024.0);
  }
}

TEST(Run, GoldenOnly) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.faults.clear();
  cfg.finalize();
  const auto records = run_experiment(cfg);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_FALSE(r.fault);
    EXPECT_EQ(r.l2, 0.0);
    EXPECT_EQ(r.category, Category::Robust);
  }
  EXPECT_NE(to_csv(records).find("golden,none,-1,-1,-1,0,1,1,0,0,1,robust"), std::string::npos);
}

TEST(Run, DeterministicAndWorkerIndependent) {
  for (Mode mode : {Mode::Vanilla, Mode::RnsNtt}) {
    ExperimentConfig cfg = small_config(mode, mode == Mode::Vanilla ? 1 : 2);
    cfg.sampling = Sampling::strided(5);
    cfg.finalize();
    const std::string a = to_csv(run_experiment(cfg));
    const std::string b = to_csv(run_experiment(cfg));
    cfg.workers = 3;
    const std::string c = to_csv(run_experiment(cfg));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
  }
}

TEST(Run, RecordOrder) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.finalize();
  const auto records = run_experiment(cfg);
  const std::size_t per_pair = 1 + 2 * 16 * 60;
  ASSERT_EQ(records.size(), 2 * per_pair);
  EXPECT_FALSE(records[0].fault);
  EXPECT_EQ(records[1].fault->to_string(), "post_encrypt:c0:0:0:0");
  EXPECT_EQ(records[per_pair - 1].fault->to_string(), "post_encrypt:c1:0:15:59");
  EXPECT_EQ(records[per_pair].scheme_seed, 2u);
}

TEST(Run, SecretKeyEncryptionAndAudit) {
  ExperimentConfig cfg = small_config(Mode::RnsOnly, 2);
  cfg.encryption = Encryption::SecretKey;
  cfg.audit_interval = 7;
  cfg.sampling = Sampling::strided(3);
  cfg.finalize();
  EXPECT_NO_THROW(run_experiment(cfg));
  const auto ctx = CkksContext::create(cfg.params);
  const GoldenRun g = compute_golden(*ctx, cfg, 1, 1);
  EXPECT_TRUE(audit_golden(*ctx, cfg, g));
  GoldenRun tampered = g;
  tampered.decoded[0] += 1e-9;
  EXPECT_FALSE(audit_golden(*ctx, cfg, tampered));
}

TEST(Run, PostEncodeMatchesFreshEncryption) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.finalize();
  const auto ctx = CkksContext::create(cfg.params);
  const TrialRunner runner(ctx, cfg, compute_golden(*ctx, cfg, 1, 1));
  const FaultSpec spec{Stage::PostEncode, Target::PlaintextPoly, 0, 2, 33};
  PipelineState s;
  s.stage = Stage::PostEncode;
  s.plaintext = runner.golden().encoded;
  const Plaintext faulty = *inject(*ctx, s, spec).plaintext;
  Rng rng = derive_rng(1, {"encrypt"});
  const Ciphertext ct = encrypt_pk(*ctx, faulty, runner.golden().keys.pk, rng);
  EXPECT_EQ(runner.run(spec).decoded, decode_pt(*ctx, decrypt(*ctx, ct, runner.golden().keys.sk)));
}

TEST(Run, PreDecodeFlipOnDecryptedPlaintext) {
  ExperimentConfig cfg = small_config(Mode::RnsOnly, 2);
  cfg.finalize();
  const auto ctx = CkksContext::create(cfg.params);
  const TrialRunner runner(ctx, cfg, compute_golden(*ctx, cfg, 1, 1));
  const auto r = runner.run(FaultSpec{Stage::PreDecode, Target::PlaintextPoly, 1, 1, 50});
  EXPECT_EQ(r.decoded, runner.golden().decoded);
  EXPECT_EQ(r.record.category, Category::Robust);
}

TEST(Run, InvalidParamsAreConfigErrors) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.params.delta_log2 = 70;
  EXPECT_THROW(cfg.finalize(), ConfigError);
}

TEST(Run, TrialFailureNamesTheSpec) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.input_lo = 1e12;
  cfg.input_hi = 2e12;
  cfg.finalize();
  // The golden encode fails the capacity check before any trial runs.
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  TrialFailure f("post_encrypt:c0:0:1:2", "boom");
  EXPECT_EQ(f.spec(), "post_encrypt:c0:0:1:2");
  EXPECT_NE(std::string(f.what()).find("post_encrypt:c0:0:1:2"), std::string::npos);
}

TEST(Csv, RoundTrip) {
  ExperimentConfig cfg = small_config(Mode::RnsOnly, 2);
  cfg.sampling = Sampling::strided(17);
  cfg.finalize();
  const auto records = run_experiment(cfg);
  const std::string text = to_csv(records);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::istringstream in(text);
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].fault, records[i].fault);
    EXPECT_EQ(back[i].l2, records[i].l2);
    EXPECT_EQ(back[i].mse, records[i].mse);
    EXPECT_EQ(back[i].frac_correct, records[i].frac_correct);
    EXPECT_EQ(back[i].category, records[i].category);
    EXPECT_EQ(back[i].wrapped, records[i].wrapped);
  }
  EXPECT_EQ(to_csv(back), text);
  std::istringstream bad("mode,N\n");
  EXPECT_THROW(read_csv(bad), ArgumentError);
}

TEST(Summary, AllRobust) {
  ExperimentConfig cfg = small_config(Mode::Vanilla);
  cfg.faults = {{Stage::PostEncrypt, Target::C0}};
  cfg.finalize();
  auto records = run_experiment(cfg);
  std::vector<TrialRecord> robust;
  for (const auto& r : records) {
    if (r.fault && r.category == Category::Robust) robust.push_back(r);
  }
  const auto s = summarize(robust);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].robust_pct, 100.0);
  EXPECT_EQ(s[0].app_dependent_pct, 0.0);
  EXPECT_EQ(s[0].catastrophic_pct, 0.0);
}

TEST(Summary, RnsGapPattern) {
  ExperimentConfig cfg = small_config(Mode::RnsOnly, 2);
  cfg.finalize();
  const auto s = summarize(run_experiment(cfg));
  ASSERT_EQ(s.size(), 2u);
  const auto& c0 = s[0];
  const auto& c1 = s[1];
  ASSERT_EQ(c0.key.target, Target::C0);
  for (const auto& c : c0.coefficients) {
    // Odd indices are never read; index N/2 only feeds imaginary parts.
    const bool invisible = c.coeff % 2 == 1 || c.coeff == 8;
    EXPECT_EQ(c.robust_bits, invisible ? 64.0 : 0.0) << c.limb << " " << c.coeff;
    EXPECT_EQ(c.onset_bit, invisible ? -1 : 0);
  }
  // A c1 flip at index c adds e * X^c * s, so it stays invisible exactly when
  // s vanishes on every index that rotates onto a read coefficient.
  const auto ctx = CkksContext::create(cfg.params);
  std::map<std::pair<std::size_t, std::size_t>, double> expected;
  std::size_t invisible_trials = 0;
  for (const auto seed : cfg.scheme_seeds) {
    const auto g = compute_golden(*ctx, cfg, seed, 1);
    const auto& sk = g.keys.sk.s.coeffs;
    for (std::size_t c = 0; c < 16; ++c) {
      bool hidden = true;
      for (const std::size_t i : {0u, 2u, 4u, 6u, 10u, 12u, 14u}) hidden = hidden && sk[(i + 16 - c) % 16] == 0;
      for (std::size_t limb = 0; limb < 2; ++limb) {
        expected[{limb, c}] += hidden ? 64.0 / 2 : 0.0;
        invisible_trials += hidden ? 64 : 0;
      }
    }
  }
  for (const auto& c : c1.coefficients) {
    EXPECT_EQ(c.robust_bits, (expected[{c.limb, c.coeff}])) << c.limb << " " << c.coeff;
  }
  EXPECT_DOUBLE_EQ(c1.catastrophic_pct, 100.0 * (4096 - invisible_trials) / 4096);
  EXPECT_DOUBLE_EQ(c1.robust_pct, 100.0 * invisible_trials / 4096);
}

TEST(Summary, RnsC1AllCatastrophicWithDenseSecret) {
  ExperimentConfig cfg = small_config(Mode::RnsOnly, 2);
  cfg.params.hamming_weight = 16;
  cfg.faults = {{Stage::PostEncrypt, Target::C1}};
  cfg.finalize();
  const auto s = summarize(run_experiment(cfg));
  ASSERT_EQ(s.size(), 1u);
  for (const auto& c : s[0].coefficients) EXPECT_EQ(c.robust_bits, 0.0);
  std::ostringstream os;
  write_summary(os, s);
  EXPECT_NE(os.str().find("rns,16,60,2,20,4,post_encrypt,c1,4096,0.00,0.00,100.00,0.00"), std::string::npos);
}

}  // namespace
}  // namespace faultlab
