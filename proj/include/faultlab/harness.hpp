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

// Experiment orchestration: configuration, golden runs, fault trials, CSV
// records and summaries.

#ifndef FAULTLAB_HARNESS_HPP_
#define FAULTLAB_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "faultlab/ckks.hpp"
#include "faultlab/errors.hpp"
#include "faultlab/fault.hpp"
#include "faultlab/metrics.hpp"
#include "faultlab/random.hpp"

namespace faultlab {

enum class InputSource { UniformRandom, FileVector };
enum class Encryption { PublicKey, SecretKey };

struct ExperimentConfig {
  SchemeParams params;
  std::vector<StageTarget> faults;  // empty: golden rows only
  Sampling sampling;
  bool sampling_set = false;
  bool allow_exhaustive = false;
  std::vector<std::uint64_t> scheme_seeds;
  std::vector<std::uint64_t> input_seeds;
  double input_lo = 0.0;
  double input_hi = 256.0;
  InputSource input_source = InputSource::UniformRandom;
  std::string input_path;
  double tau = kDefaultTau;
  std::string output_path;
  Encryption encryption = Encryption::PublicKey;
  FaultDomain fault_domain = FaultDomain::Coefficient;
  std::size_t audit_interval = 1000;
  std::size_t workers = 1;

  // Rings at or above this size default to random sampling and need
  // allow_exhaustive for a full sweep.
  static constexpr std::size_t kLargeRing = 4096;

  /// Fills defaults and checks consistency; throws ConfigError.
  void finalize() {
    try {
      params.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid scheme parameters: ") + e.what());
    }
    if (scheme_seeds.empty()) scheme_seeds = {1, 2, 3, 4};
    if (input_seeds.empty()) input_seeds = {1, 2, 3, 4};
    if (!(input_lo < input_hi)) throw ConfigError("input_lo must be below input_hi");
    if (input_source == InputSource::FileVector && input_path.empty()) {
      throw ConfigError("file input needs a path");
    }
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    if (audit_interval == 0) throw ConfigError("audit_interval must be >= 1");
    const bool large = params.ring_dimension >= kLargeRing;
    if (!sampling_set && large) sampling = Sampling::random_subset(1000, 1);
    if (large && sampling.kind == Sampling::Kind::Exhaustive && !allow_exhaustive && !faults.empty()) {
      throw ConfigError("exhaustive sweep at N >= " + std::to_string(kLargeRing) +
                        " requires allow_exhaustive = true");
    }
    for (const auto& st : faults) {
      if (!stage_accepts(st.first, st.second)) throw ConfigError("invalid stage/target pair in faults");
    }
  }

  /// Seed grids: "ci" is 4 x 4, "paper" is 100 scheme x 25 input seeds.
  void apply_profile(std::string_view profile) {
    auto range = [](std::uint64_t n) {
      std::vector<std::uint64_t> v(n);
      for (std::uint64_t i = 0; i < n; ++i) v[i] = i + 1;
      return v;
    };
    if (profile == "ci") {
      scheme_seeds = range(4);
      input_seeds = range(4);
    } else if (profile == "paper") {
      scheme_seeds = range(100);
      input_seeds = range(25);
    } else {
      throw ConfigError("unknown profile '" + std::string(profile) + "'");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  is.imbue(std::locale::classic());
  T out{};
  is >> out;
  if (!is || !is.eof()) throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

// "1,2,5" or "1..4" (inclusive), or a mix: "1..3,7".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(value, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<std::uint64_t>(key, item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(key, item.substr(0, dots));
    const auto hi = parse_number<std::uint64_t>(key, item.substr(dots + 2));
    if (hi < lo) throw ConfigError("key '" + key + "': empty range " + item);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty seed list");
  return out;
}

inline Sampling parse_sampling(const std::string& value) {
  const auto parts = split(value, ':');
  if (parts[0] == "exhaustive" && parts.size() == 1) return Sampling::exhaustive();
  if (parts[0] == "strided" && parts.size() == 2) {
    return Sampling::strided(parse_number<std::size_t>("sampling", parts[1]));
  }
  if (parts[0] == "random" && (parts.size() == 2 || parts.size() == 3)) {
    const auto count = parse_number<std::size_t>("sampling", parts[1]);
    const auto seed = parts.size() == 3 ? parse_number<std::uint64_t>("sampling", parts[2]) : 1;
    return Sampling::random_subset(count, seed);
  }
  throw ConfigError("sampling: expected exhaustive | strided:K | random:COUNT[:SEED], got '" + value + "'");
}

inline std::vector<StageTarget> parse_fault_filter(const std::string& value) {
  std::vector<StageTarget> out;
  if (value == "none" || value.empty()) return out;
  for (const auto& item : split(value, ',')) {
    const auto parts = split(item, ':');
    try {
      if (parts.size() != 2) throw ArgumentError("expected stage:target");
      out.emplace_back(parse_stage(parts[0]), parse_target(parts[1]));
    } catch (const ArgumentError& e) {
      throw ConfigError("faults: '" + item + "': " + e.what());
    }
  }
  return out;
}

}  // namespace detail

/// Parses the flat `key = value` format ('#' starts a comment). Unknown keys
/// are errors. Relative file paths resolve against `base_dir`.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    using detail::parse_number;
    if (key == "mode") {
      cfg.params.mode = parse_mode(value);
    } else if (key == "N") {
      cfg.params.ring_dimension = parse_number<std::size_t>(key, value);
    } else if (key == "q0_bits") {
      cfg.params.q0_bits = parse_number<int>(key, value);
    } else if (key == "limbs") {
      cfg.params.num_limbs = parse_number<std::size_t>(key, value);
    } else if (key == "delta_log2") {
      cfg.params.delta_log2 = parse_number<int>(key, value);
    } else if (key == "slots") {
      cfg.params.slots = parse_number<std::size_t>(key, value);
    } else if (key == "hamming_weight") {
      cfg.params.hamming_weight = parse_number<std::size_t>(key, value);
    } else if (key == "sigma") {
      cfg.params.sigma = parse_number<double>(key, value);
    } else if (key == "vanilla_levels") {
      cfg.params.vanilla_levels = parse_number<int>(key, value);
    } else if (key == "faults") {
      cfg.faults = detail::parse_fault_filter(value);
    } else if (key == "sampling") {
      cfg.sampling = detail::parse_sampling(value);
      cfg.sampling_set = true;
    } else if (key == "allow_exhaustive") {
      cfg.allow_exhaustive = detail::parse_bool(key, value);
    } else if (key == "scheme_seeds") {
      cfg.scheme_seeds = detail::parse_seed_list(key, value);
    } else if (key == "input_seeds") {
      cfg.input_seeds = detail::parse_seed_list(key, value);
    } else if (key == "input_lo") {
      cfg.input_lo = parse_number<double>(key, value);
    } else if (key == "input_hi") {
      cfg.input_hi = parse_number<double>(key, value);
    } else if (key == "input_source") {
      if (value == "uniform") {
        cfg.input_source = InputSource::UniformRandom;
      } else if (value.rfind("file:", 0) == 0) {
        cfg.input_source = InputSource::FileVector;
        std::filesystem::path p = value.substr(5);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.input_path = p.string();
      } else {
        throw ConfigError("input_source: expected uniform | file:PATH");
      }
    } else if (key == "tau") {
      cfg.tau = parse_number<double>(key, value);
    } else if (key == "output") {
      cfg.output_path = value;
    } else if (key == "encryption") {
      if (value == "public") {
        cfg.encryption = Encryption::PublicKey;
      } else if (value == "secret") {
        cfg.encryption = Encryption::SecretKey;
      } else {
        throw ConfigError("encryption: expected public | secret");
      }
    } else if (key == "fault_domain") {
      try {
        cfg.fault_domain = parse_fault_domain(value);
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "audit_interval") {
      cfg.audit_interval = parse_number<std::size_t>(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_number<std::size_t>(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

/// One decimal value per line; blank lines and '#' comments are skipped.
inline std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input vector " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    out.push_back(detail::parse_number<double>("input file", t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct TrialRecord {
  std::optional<FaultSpec> fault;  // empty for the golden row
  Mode mode = Mode::Vanilla;
  std::size_t ring_dimension = 0;
  int q0_bits = 0;
  std::size_t limbs = 0;
  int delta_log2 = 0;
  std::size_t slots = 0;
  bool wrapped = false;
  std::uint64_t scheme_seed = 0;
  std::uint64_t input_seed = 0;
  double l2 = 0.0;
  double mse = 0.0;
  double frac_correct = 1.0;
  Category category = Category::Robust;
  std::string fingerprint;
};

inline constexpr std::string_view kCsvHeader =
    "mode,N,q0_bits,L,delta_log2,slots,stage,target,limb,coeff,bit,wrapped,scheme_seed,input_seed,l2,mse,"
    "frac_correct,category";

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline std::string to_csv_row(const TrialRecord& r) {
  std::ostringstream os;
  os << to_string(r.mode) << ',' << r.ring_dimension << ',' << r.q0_bits << ',' << r.limbs << ','
     << r.delta_log2 << ',' << r.slots << ',';
  if (r.fault) {
    os << to_string(r.fault->stage) << ',' << to_string(r.fault->target) << ',' << r.fault->limb << ','
       << r.fault->coeff << ',' << r.fault->bit << ',';
  } else {
    os << "golden,none,-1,-1,-1,";
  }
  os << (r.wrapped ? 1 : 0) << ',' << r.scheme_seed << ',' << r.input_seed << ',' << detail::format_double(r.l2)
     << ',' << detail::format_double(r.mse) << ',' << detail::format_double(r.frac_correct) << ','
     << to_string(r.category);
  return os.str();
}

inline std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) {
    throw ArgumentError("CSV header does not match the record schema");
  }
  std::vector<TrialRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 18) throw ArgumentError("CSV line " + std::to_string(lineno) + ": expected 18 fields");
    try {
      TrialRecord r;
      r.mode = parse_mode(f[0]);
      r.ring_dimension = std::stoul(f[1]);
      r.q0_bits = std::stoi(f[2]);
      r.limbs = std::stoul(f[3]);
      r.delta_log2 = std::stoi(f[4]);
      r.slots = std::stoul(f[5]);
      if (f[6] != "golden") {
        r.fault = FaultSpec{parse_stage(f[6]), parse_target(f[7]), std::stoul(f[8]), std::stoul(f[9]),
                            std::stoi(f[10])};
      }
      r.wrapped = f[11] == "1";
      r.scheme_seed = std::stoull(f[12]);
      r.input_seed = std::stoull(f[13]);
      r.l2 = std::stod(f[14]);
      r.mse = std::stod(f[15]);
      r.frac_correct = std::stod(f[16]);
      r.category = parse_category(f[17]);
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ArgumentError("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Golden runs and trials
// ---------------------------------------------------------------------------

/// Fault-free pipeline for one (scheme seed, input seed) pair. `mask` is the
/// encryption of zero under the replayed encryption randomness, so the
/// encryption of any plaintext m with the same randomness is mask + (m, 0).
struct GoldenRun {
  std::uint64_t scheme_seed = 0;
  std::uint64_t input_seed = 0;
  KeyPair keys;
  std::vector<double> input;
  Plaintext encoded;
  Ciphertext mask;
  Ciphertext ciphertext;
  Plaintext decrypted;
  std::vector<double> decoded;
};

inline std::vector<double> make_input(const ExperimentConfig& cfg, std::uint64_t input_seed) {
  const std::size_t n = cfg.params.slots;
  if (cfg.input_source == InputSource::FileVector) {
    std::vector<double> v = read_vector_file(cfg.input_path);
    if (v.size() != n) {
      throw ConfigError("input file has " + std::to_string(v.size()) + " values, slots = " + std::to_string(n));
    }
    return v;
  }
  Rng rng = derive_rng(input_seed, {"input"});
  std::vector<double> v(n);
  for (auto& x : v) x = cfg.input_lo + (cfg.input_hi - cfg.input_lo) * rng.uniform01();
  return v;
}

inline Ciphertext apply_mask(const CkksContext& ctx, const Ciphertext& mask, const Plaintext& pt) {
  return Ciphertext{ctx.add(mask.c0, pt.poly), mask.c1};
}

inline GoldenRun compute_golden(const CkksContext& ctx, const ExperimentConfig& cfg, std::uint64_t scheme_seed,
                                std::uint64_t input_seed) {
  GoldenRun g;
  g.scheme_seed = scheme_seed;
  g.input_seed = input_seed;
  g.keys = keygen(ctx, scheme_seed);
  g.input = make_input(cfg, input_seed);
  g.encoded = encode_pt(ctx, g.input);
  const Plaintext zero{ctx.zero(), ctx.params().delta_log2, ctx.params().slots};
  Rng rng = derive_rng(scheme_seed, {"encrypt"});
  if (cfg.encryption == Encryption::PublicKey) {
    const PkRandomness r = sample_pk_randomness(ctx, rng);
    g.mask = encrypt_pk_with(ctx, zero, g.keys.pk, r.v, r.e1, r.e2);
  } else {
    g.mask = encrypt_sk(ctx, zero, g.keys.sk, rng);
  }
  g.ciphertext = apply_mask(ctx, g.mask, g.encoded);
  g.decrypted = decrypt(ctx, g.ciphertext, g.keys.sk);
  g.decoded = decode_pt(ctx, g.decrypted);
  return g;
}

struct TrialResult {
  TrialRecord record;
  std::vector<double> decoded;
  Plaintext decrypted;
};

class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(const std::string& spec, const std::string& what)
      : std::runtime_error("trial " + spec + " failed: " + what), spec_(spec) {}
  const std::string& spec() const { return spec_; }

 private:
  std::string spec_;
};

/// Runs fault trials against one golden run.
class TrialRunner {
 public:
  TrialRunner(std::shared_ptr<const CkksContext> ctx, const ExperimentConfig& cfg, GoldenRun golden)
      : ctx_(std::move(ctx)), cfg_(cfg), golden_(std::move(golden)),
        decryptor_(ctx_, golden_.keys.sk, golden_.ciphertext) {}

  const GoldenRun& golden() const { return golden_; }
  const CkksContext& context() const { return *ctx_; }

  TrialRecord golden_record() const {
    TrialRecord r = base_record();
    r.l2 = 0.0;
    r.mse = 0.0;
    r.frac_correct = 1.0;
    r.category = Category::Robust;
    return r;
  }

  /// inject -> (encrypt) -> decrypt -> decode -> metrics.
  TrialResult run(const FaultSpec& spec) const {
    const CkksContext& ctx = *ctx_;
    PipelineState state;
    state.stage = spec.stage;
    switch (spec.stage) {
      case Stage::PostEncode: state.plaintext = golden_.encoded; break;
      case Stage::PostEncrypt: state.ciphertext = golden_.ciphertext; break;
      case Stage::PreDecode: state.plaintext = golden_.decrypted; break;
    }
    state = inject(ctx, std::move(state), spec, cfg_.fault_domain);

    TrialResult out;
    switch (spec.stage) {
      case Stage::PostEncode:
        out.decrypted = decryptor_.decrypt(apply_mask(ctx, golden_.mask, *state.plaintext));
        break;
      case Stage::PostEncrypt:
        out.decrypted = decryptor_.decrypt(*state.ciphertext);
        break;
      case Stage::PreDecode:
        out.decrypted = std::move(*state.plaintext);
        break;
    }
    out.decoded = decode_pt(ctx, out.decrypted);

    TrialRecord& r = out.record;
    r = base_record();
    r.fault = spec;
    r.wrapped = state.wrapped;
    r.l2 = l2_error(golden_.decoded, out.decoded);
    r.mse = mse(golden_.decoded, out.decoded);
    const auto cls = classify(relative_errors(golden_.decoded, out.decoded, cfg_.tau), cfg_.tau);
    r.frac_correct = cls.frac_correct;
    r.category = cls.category;
    return out;
  }

 private:
  TrialRecord base_record() const {
    const auto& p = ctx_->params();
    TrialRecord r;
    r.mode = p.mode;
    r.ring_dimension = p.ring_dimension;
    r.q0_bits = p.q0_bits;
    r.limbs = p.num_limbs;
    r.delta_log2 = p.delta_log2;
    r.slots = p.slots;
    r.scheme_seed = golden_.scheme_seed;
    r.input_seed = golden_.input_seed;
    r.fingerprint = p.fingerprint();
    return r;
  }

  std::shared_ptr<const CkksContext> ctx_;
  const ExperimentConfig& cfg_;
  GoldenRun golden_;
  CachedDecryptor decryptor_;
};

/// Recomputes the golden run from scratch and compares it with the cache.
inline bool audit_golden(const CkksContext& ctx, const ExperimentConfig& cfg, const GoldenRun& cached) {
  const GoldenRun fresh = compute_golden(ctx, cfg, cached.scheme_seed, cached.input_seed);
  return fresh.ciphertext == cached.ciphertext && fresh.decrypted == cached.decrypted &&
         fresh.decoded == cached.decoded;
}

using RecordSink = std::function<void(const TrialRecord&)>;

/// For each (scheme seed, input seed): one golden row, then one record per
/// fault spec in enumeration order. Trials run on `cfg.workers` threads;
/// emission order does not depend on the worker count.
inline void run_experiment(const ExperimentConfig& cfg, const RecordSink& sink) {
  std::shared_ptr<const CkksContext> ctx;
  std::vector<FaultSpec> specs;
  try {
    ctx = CkksContext::create(cfg.params);
    if (!cfg.faults.empty()) specs = enumerate_faults(*ctx, cfg.faults, cfg.sampling);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  std::size_t trial_counter = 0;
  for (const auto scheme_seed : cfg.scheme_seeds) {
    for (const auto input_seed : cfg.input_seeds) {
      GoldenRun golden;
      try {
        golden = compute_golden(*ctx, cfg, scheme_seed, input_seed);
      } catch (const CapacityError& e) {
        throw ConfigError(std::string("input does not fit the parameters: ") + e.what());
      }
      const TrialRunner runner(ctx, cfg, std::move(golden));
      sink(runner.golden_record());

      std::vector<TrialRecord> records(specs.size());
      std::atomic<std::size_t> next{0};
      std::exception_ptr failure;
      std::mutex failure_mu;
      auto work = [&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= specs.size()) return;
          try {
            records[i] = runner.run(specs[i]).record;
          } catch (const std::exception& e) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::make_exception_ptr(TrialFailure(specs[i].to_string(), e.what()));
            next.store(specs.size());
            return;
          }
        }
      };
      const std::size_t workers = std::min<std::size_t>(cfg.workers, std::max<std::size_t>(specs.size(), 1));
      if (workers <= 1) {
        work();
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
      }
      if (failure) std::rethrow_exception(failure);

      for (std::size_t i = 0; i < specs.size(); ++i) {
        if (++trial_counter % cfg.audit_interval == 0 && !audit_golden(*ctx, cfg, runner.golden())) {
          throw TrialFailure(specs[i].to_string(), "golden cache audit mismatch");
        }
        sink(records[i]);
      }
    }
  }
}

inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> out;
  run_experiment(cfg, [&](const TrialRecord& r) { out.push_back(r); });
  return out;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

struct GroupKey {
  Mode mode;
  std::size_t ring_dimension;
  int q0_bits;
  std::size_t limbs;
  int delta_log2;
  std::size_t slots;
  Stage stage;
  Target target;

  auto operator<=>(const GroupKey&) const = default;
};

struct CoefficientSummary {
  std::size_t limb = 0;
  std::size_t coeff = 0;
  double robust_bits = 0.0;  // mean over seed pairs
  int onset_bit = -1;        // median over seed pairs of the first bit with l2 > tau; -1 if none
};

struct GroupSummary {
  GroupKey key;
  std::size_t trials = 0;
  double robust_pct = 0.0;
  double app_dependent_pct = 0.0;
  double catastrophic_pct = 0.0;
  std::vector<CoefficientSummary> coefficients;
};

/// Category percentages per (mode, N, q0, L, Delta, slots, stage, target),
/// with robust-bit counts and onset bits per (limb, coefficient).
inline std::vector<GroupSummary> summarize(const std::vector<TrialRecord>& records, double tau = kDefaultTau) {
  struct CoeffAcc {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> robust;  // per seed pair
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> onset;
  };
  struct Acc {
    std::size_t counts[3] = {0, 0, 0};
    std::map<std::pair<std::size_t, std::size_t>, CoeffAcc> coeffs;
  };
  std::map<GroupKey, Acc> groups;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seed_pairs;
  for (const auto& r : records) {
    if (!r.fault) continue;
    const GroupKey key{r.mode, r.ring_dimension, r.q0_bits, r.limbs, r.delta_log2, r.slots, r.fault->stage,
                       r.fault->target};
    Acc& acc = groups[key];
    ++acc.counts[static_cast<int>(r.category)];
    const auto seeds = std::make_pair(r.scheme_seed, r.input_seed);
    seed_pairs.insert(seeds);
    CoeffAcc& c = acc.coeffs[{r.fault->limb, r.fault->coeff}];
    std::size_t& robust = c.robust[seeds];
    if (r.category == Category::Robust) ++robust;
    auto it = c.onset.find(seeds);
    if (it == c.onset.end()) it = c.onset.emplace(seeds, -1).first;
    if (r.l2 > tau && (it->second < 0 || r.fault->bit < it->second)) it->second = r.fault->bit;
  }
  std::vector<GroupSummary> out;
  for (const auto& [key, acc] : groups) {
    GroupSummary g;
    g.key = key;
    g.trials = acc.counts[0] + acc.counts[1] + acc.counts[2];
    g.robust_pct = 100.0 * acc.counts[0] / g.trials;
    g.app_dependent_pct = 100.0 * acc.counts[1] / g.trials;
    g.catastrophic_pct = 100.0 * acc.counts[2] / g.trials;
    for (const auto& [lc, c] : acc.coeffs) {
      CoefficientSummary cs;
      cs.limb = lc.first;
      cs.coeff = lc.second;
      double sum = 0.0;
      for (const auto& [seeds, n] : c.robust) sum += static_cast<double>(n);
      cs.robust_bits = sum / static_cast<double>(c.robust.size());
      std::vector<int> onsets;
      for (const auto& [seeds, b] : c.onset) onsets.push_back(b);
      std::sort(onsets.begin(), onsets.end());
      cs.onset_bit = onsets[onsets.size() / 2];
      g.coefficients.push_back(cs);
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline void write_summary(std::ostream& os, const std::vector<GroupSummary>& groups) {
  os << "mode,N,q0_bits,L,delta_log2,slots,stage,target,trials,robust_pct,app_dependent_pct,catastrophic_pct,"
        "mean_robust_bits\n";
  for (const auto& g : groups) {
    double mean_bits = 0.0;
    for (const auto& c : g.coefficients) mean_bits += c.robust_bits;
    if (!g.coefficients.empty()) mean_bits /= static_cast<double>(g.coefficients.size());
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%zu,%d,%zu,%d,%zu,%s,%s,%zu,%.2f,%.2f,%.2f,%.2f\n", to_string(g.key.mode),
                  g.key.ring_dimension, g.key.q0_bits, g.key.limbs, g.key.delta_log2, g.key.slots,
                  to_string(g.key.stage), to_string(g.key.target), g.trials, g.robust_pct, g.app_dependent_pct,
                  g.catastrophic_pct, mean_bits);
    os << buf;
  }
  os << "\nmode,delta_log2,stage,target,limb,coeff,robust_bits,onset_bit\n";
  for (const auto& g : groups) {
    for (const auto& c : g.coefficients) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%d,%s,%s,%zu,%zu,%.2f,%d\n", to_string(g.key.mode), g.key.delta_log2,
                    to_string(g.key.stage), to_string(g.key.target), c.limb, c.coeff, c.robust_bits, c.onset_bit);
      os << buf;
    }
  }
}

}  // namespace faultlab

#endif  // FAULTLAB_HARNESS_HPP_
