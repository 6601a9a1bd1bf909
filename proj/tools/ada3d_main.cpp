// Copyright 2026 The Ada3D Authors. All Rights Reserved.
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


// Command-line front end: data generation, training, evaluation, cost
// benchmarks and the linear-algebra demonstrations.

#include <CLI11.hpp>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ada3d/ada3d.hpp"
#include "ada3d/analysis.hpp"
#include "ada3d/conv.hpp"
#include "ada3d/cost_model.hpp"
#include "ada3d/error.hpp"
#include "ada3d/io.hpp"
#include "ada3d/metrics.hpp"
#include "ada3d/network.hpp"
#include "ada3d/params.hpp"

namespace {

using namespace ada3d;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kShape = 4,
  kConfig = 5,
  kDivergence = 6,
};

void emit(const Record& r) { std::cout << r.str() << '\n'; }

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::vector<FusionSample> load_normalized(const std::string& path) {
  std::vector<FusionSample> data = load_dataset(path);
  normalize_dataset(data);
  return data;
}

struct GenDataOptions {
  SyntheticDatasetSpec spec;
  std::size_t hw = 32;
  std::string out = "dataset.atns";
};

int run_gen_data(const GenDataOptions& o) {
  SyntheticDatasetSpec spec = o.spec;
  spec.height = spec.width = o.hw;
  const std::vector<FusionSample> samples = gen_synthetic_dataset(spec);
  save_dataset(o.out, samples);
  std::uint32_t pan_crc = 0;
  {
    NamedTensors pans;
    for (std::size_t i = 0; i < samples.size(); ++i) pans.emplace_back(std::to_string(i), samples[i].pan);
    pan_crc = checksum(encode_container(pans));
  }
  const NamedTensors written = read_tensor_file(o.out);
  emit(Record()
           .add("cmd", "gen-data")
           .add("out", o.out)
           .add("samples", static_cast<std::uint64_t>(samples.size()))
           .add("height", static_cast<std::uint64_t>(spec.height))
           .add("width", static_cast<std::uint64_t>(spec.width))
           .add("bands", static_cast<std::uint64_t>(spec.bands))
           .add("entries", static_cast<std::uint64_t>(written.size()))
           .add("pan_crc32", hex32(pan_crc))
           .add("file_crc32", hex32(checksum(encode_container(written)))));
  std::cerr << "wrote " << samples.size() << " samples to " << o.out << '\n';
  return kOk;
}

struct TrainOptions {
  std::string data = "dataset.atns";
  std::string preset = "toy";
  std::string config;
  std::string out = "model.atns";
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<double> lr;
  std::optional<double> lambda_ergas;
  std::optional<std::uint64_t> seed;
};

int run_train(const TrainOptions& o) {
  const std::vector<FusionSample> data = load_normalized(o.data);
  NetworkConfig net_cfg = NetworkConfig::preset(o.preset, data.front().bands());
  TrainConfig train_cfg = TrainConfig::preset(o.preset);
  if (!o.config.empty()) apply_config(read_key_values(o.config), net_cfg, train_cfg);
  if (o.epochs) {
    // Keep the preset's halving period when only the epoch count changes.
    const std::size_t old_epochs = train_cfg.epochs;
    train_cfg.epochs = *o.epochs;
    if (!train_cfg.halve_at.empty() && train_cfg.halve_at == halving_every(train_cfg.halve_at.front(), old_epochs)) {
      train_cfg.halve_at = halving_every(train_cfg.halve_at.front(), train_cfg.epochs);
    }
  }
  if (o.batch) train_cfg.batch_size = *o.batch;
  if (o.lr) train_cfg.learning_rate = *o.lr;
  if (o.lambda_ergas) train_cfg.lambda_ergas = *o.lambda_ergas;
  if (o.seed) train_cfg.seed = *o.seed;
  if (net_cfg.bands != data.front().bands()) {
    throw ShapeError("config asks for " + std::to_string(net_cfg.bands) + " bands, data has " +
                     std::to_string(data.front().bands()));
  }
  net_cfg.validate();
  train_cfg.validate();

  FusionNet net(net_cfg, train_cfg.seed);
  emit(Record()
           .add("cmd", "train")
           .add("preset", o.preset)
           .add("samples", static_cast<std::uint64_t>(data.size()))
           .add("params", static_cast<std::uint64_t>(net.parameters().element_count()))
           .add("epochs", static_cast<std::uint64_t>(train_cfg.epochs))
           .add("batch", static_cast<std::uint64_t>(train_cfg.batch_size))
           .add("lr", train_cfg.learning_rate)
           .add("lambda_ergas", train_cfg.lambda_ergas)
           .add("seed", train_cfg.seed));
  const TrainResult result = train(net, data, train_cfg, [](const EpochRecord& e) {
    emit(Record()
             .add("epoch", static_cast<std::uint64_t>(e.epoch))
             .add("loss", e.loss)
             .add("lr", e.learning_rate));
    std::cout.flush();
  });
  save_checkpoint(o.out, net);
  emit(Record()
           .add("cmd", "train-done")
           .add("out", o.out)
           .add("first_loss", result.history.front().loss)
           .add("final_loss", result.history.back().loss));
  return kOk;
}

struct EvalOptions {
  std::string model = "model.atns";
  std::string data = "dataset.atns";
  std::string dump_dir;
};

Record metric_record(const char* method, std::size_t sample, const MetricReport& m) {
  Record r;
  r.add("method", method)
      .add("sample", static_cast<std::uint64_t>(sample))
      .add("psnr", m.psnr)
      .add("ssim", m.ssim)
      .add("sam", m.sam)
      .add("ergas", m.ergas)
      .add("cc", m.cc);
  return r;
}

int run_eval(const EvalOptions& o) {
  const FusionNet net = load_checkpoint(o.model);
  const std::vector<FusionSample> data = load_normalized(o.data);
  if (!o.dump_dir.empty()) std::filesystem::create_directories(o.dump_dir);
  MetricReport mean_net{}, mean_bic{};
  std::size_t scored = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Tensor est = net.predict(data[i]);
    if (!o.dump_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "sample%04zu", i);
      write_band_pgms(est, (std::filesystem::path(o.dump_dir) / name).string());
    }
    if (!data[i].gt) continue;
    const MetricReport a = evaluate_metrics(est, *data[i].gt);
    const MetricReport b = evaluate_metrics(bicubic_baseline(data[i]), *data[i].gt);
    emit(metric_record("ada3d", i, a));
    emit(metric_record("bicubic", i, b));
    for (auto [dst, src] : {std::pair{&mean_net, &a}, std::pair{&mean_bic, &b}}) {
      dst->psnr += src->psnr;
      dst->ssim += src->ssim;
      dst->sam += src->sam;
      dst->ergas += src->ergas;
      dst->cc += src->cc;
    }
    ++scored;
  }
  if (scored == 0) {
    std::cerr << "no ground truth in " << o.data << ", nothing scored\n";
    return kOk;
  }
  for (auto [name, m] : {std::pair{"ada3d", &mean_net}, std::pair{"bicubic", &mean_bic}}) {
    const double n = static_cast<double>(scored);
    emit(Record()
             .add("method", name)
             .add("sample", "mean")
             .add("psnr", m->psnr / n)
             .add("ssim", m->ssim / n)
             .add("sam", m->sam / n)
             .add("ergas", m->ergas / n)
             .add("cc", m->cc / n));
  }
  return kOk;
}

struct BenchOptions {
  std::string paradigm = "all";
  std::size_t c = 8, k = 3, h = 16, w = 16, l = 8, reps = 3;
  double alpha = 1.0, beta = 1.0;
  bool timing = true;
};

double time_paradigm(Paradigm p, const BenchOptions& o) {
  Rng rng(1);
  NoGradGuard guard;
  ParameterSet params;
  const Var x(random_uniform(Shape{o.h, o.w, o.l, o.c}, rng));
  std::function<void()> op;
  if (p == Paradigm::kStandard3d) {
    const ConvLayer layer = ConvLayer::create(conv3d_spec(o.c, o.c, o.k, 1, false), params, "std", rng);
    op = [&, layer] { conv3d(x, layer.spec, layer.weight); };
  } else if (p == Paradigm::kDepthwise3d) {
    const ConvLayer dw = ConvLayer::create(conv3d_spec(o.c, o.c, o.k, o.c, false), params, "dw", rng);
    const ConvLayer pw = ConvLayer::create(conv3d_spec(o.c, o.c, 1, 1, false), params, "pw", rng);
    op = [&, dw, pw] { conv3d(conv3d(x, dw.spec, dw.weight), pw.spec, pw.weight); };
  } else {
    Ada3DBlockConfig cfg;
    cfg.spatial_channels = cfg.spectral_channels = o.c;
    cfg.k = o.k;
    cfg.alpha = o.alpha;
    cfg.beta = o.beta;
    const Ada3DBlockWeights wts = Ada3DBlockWeights::create(cfg, params, "ada", rng);
    const Var fa(random_uniform(Shape{o.h, o.w, o.c}, rng));
    op = [&, cfg, wts, fa] { ada3d_block_forward(fa, x, cfg, wts); };
  }
  double best = 0.0;
  for (std::size_t r = 0; r < o.reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    op();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = r == 0 ? s : std::min(best, s);
  }
  return best;
}

int run_bench(const BenchOptions& o) {
  std::vector<Paradigm> which;
  if (o.paradigm == "all") {
    which = {Paradigm::kStandard3d, Paradigm::kDepthwise3d, Paradigm::kAda3d};
  } else {
    which = {parse_paradigm(o.paradigm)};
  }
  for (Paradigm p : which) {
    const CostReport c = cost_report(p, o.h, o.w, o.l, o.c, o.k, o.alpha, o.beta);
    Record r;
    r.add("paradigm", to_string(p))
        .add("c", static_cast<std::uint64_t>(o.c))
        .add("k", static_cast<std::uint64_t>(o.k))
        .add("params", c.params)
        .add("flops", c.flops)
        .add("flops_per_param", c.flops_per_param);
    if (p == Paradigm::kAda3d) r.add("bias_params", ada3d_bias_generator_params(o.c, o.c));
    if (o.timing) r.add("seconds", time_paradigm(p, o));
    emit(r);
  }
  return kOk;
}

struct RankOptions {
  std::size_t bands = 8, channels = 4, trials = 100, pixels = 64;
  std::uint64_t seed = 1;
};

int run_demo_rank(const RankOptions& o) {
  const SpectralProjectionReport rep =
      spectral_projection_demo(o.bands, o.channels, o.trials, o.seed, o.pixels);
  for (std::size_t t = 0; t < rep.trials.size(); ++t) {
    emit(Record()
             .add("trial", static_cast<std::uint64_t>(t))
             .add("rank", static_cast<std::uint64_t>(rep.trials[t].rank))
             .add("worst_error", rep.trials[t].worst_pixel_error));
  }
  emit(Record()
           .add("cmd", "demo-rank")
           .add("bands", static_cast<std::uint64_t>(rep.bands))
           .add("channels", static_cast<std::uint64_t>(rep.channels))
           .add("trials", static_cast<std::uint64_t>(rep.trials.size()))
           .add("min_rank", static_cast<std::uint64_t>(rep.min_rank))
           .add("max_rank", static_cast<std::uint64_t>(rep.max_rank))
           .add("min_worst_error", rep.min_worst_error)
           .add("max_worst_error", rep.max_worst_error));
  std::cerr << "projecting " << rep.bands << " bands onto " << rep.channels
            << " channels: smallest worst-pixel recovery error over " << rep.trials.size()
            << " trials is " << rep.min_worst_error
            << (rep.max_rank < rep.bands ? " (information lost)\n" : " (recoverable)\n");
  return kOk;
}

struct SolveOptions {
  std::size_t hw = 8, k = 3, instances = 1;
  std::uint64_t seed = 1;
};

int run_demo_solve(const SolveOptions& o) {
  std::size_t lossy = 0;
  for (std::size_t i = 0; i < o.instances; ++i) {
    const SolvabilityReport r = conv_solvability_demo(o.hw, o.hw, o.k, o.seed + i);
    if (r.standard_residual > r.adaptive_residual) ++lossy;
    emit(Record()
             .add("instance", static_cast<std::uint64_t>(i))
             .add("seed", o.seed + i)
             .add("rows", static_cast<std::uint64_t>(r.rows))
             .add("cols", static_cast<std::uint64_t>(r.cols))
             .add("rank_a", static_cast<std::uint64_t>(r.rank_a))
             .add("rank_ab", static_cast<std::uint64_t>(r.rank_augmented))
             .add("zero_rows", static_cast<std::uint64_t>(r.zero_rows))
             .add("standard_residual", r.standard_residual)
             .add("adaptive_residual", r.adaptive_residual));
  }
  std::cerr << "adaptive kernels beat the shared kernel on " << lossy << " of " << o.instances
            << " instances\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Ada3D spectral image fusion toolkit"};
  app.require_subcommand(1);

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic PAN/LR/GT dataset");
  gen_cmd->add_option("--n", gen.spec.n_samples, "Number of samples")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--hw", gen.hw, "Height and width (multiple of 4)")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--bands", gen.spec.bands, "Spectral bands")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");
  gen_cmd->add_option("--blur-sigma", gen.spec.blur_sigma, "Gaussian blur before decimation");
  gen_cmd->add_option("--field-sigma", gen.spec.field_sigma, "Smoothness of abundance fields");
  gen_cmd->add_option("--detail-sigma", gen.spec.detail_sigma, "Smoothness of the shared texture");
  gen_cmd->add_option("--out", gen.out, "Output container");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the fusion network");
  train_cmd->add_option("--data", tr.data, "Dataset container");
  train_cmd->add_option("--preset", tr.preset, "toy, hyperspectral or pansharpening");
  train_cmd->add_option("--config", tr.config, "key = value configuration file");
  train_cmd->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", tr.batch, "Batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", tr.lr, "Initial learning rate");
  train_cmd->add_option("--lambda-ergas", tr.lambda_ergas, "ERGAS loss weight");
  train_cmd->add_option("--seed", tr.seed, "Seed for initialization and shuffling");
  train_cmd->add_option("--out", tr.out, "Checkpoint path");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint against ground truth");
  eval_cmd->add_option("--model", ev.model, "Checkpoint path");
  eval_cmd->add_option("--data", ev.data, "Dataset container");
  eval_cmd->add_option("--dump-dir", ev.dump_dir, "Write 8-bit PGM band images here");

  BenchOptions be;
  auto* bench_cmd = app.add_subcommand("bench", "Parameter/FLOP counts and forward timing");
  bench_cmd->add_option("--paradigm", be.paradigm, "standard3d, depthwise3d, ada3d or all");
  bench_cmd->add_option("--c", be.c, "Channels")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--k", be.k, "Kernel extent")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--alpha", be.alpha, "Spatial generator width multiplier");
  bench_cmd->add_option("--beta", be.beta, "Spectral generator width multiplier");
  bench_cmd->add_option("--height", be.h, "Height")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--width", be.w, "Width")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--bands", be.l, "Bands")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", be.reps, "Timing repetitions")->check(CLI::PositiveNumber);
  bool no_timing = false;
  bench_cmd->add_flag("--no-timing", no_timing, "Skip the wall-clock measurement");

  RankOptions rk;
  auto* rank_cmd = app.add_subcommand("demo-rank", "Spectral information loss of a C x L projection");
  rank_cmd->add_option("--bands", rk.bands, "L")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--channels", rk.channels, "C")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--trials", rk.trials, "Trials")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--pixels", rk.pixels, "Pixels per trial")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--seed", rk.seed, "Seed of the first trial");

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("demo-solve", "Shared versus per-position kernels as linear systems");
  solve_cmd->add_option("--hw", so.hw, "Image height and width")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--k", so.k, "Kernel extent")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", so.seed, "Seed of the first instance");
  solve_cmd->add_option("--instances", so.instances, "Instances")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  be.timing = !no_timing;

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*train_cmd) return run_train(tr);
    if (*eval_cmd) return run_eval(ev);
    if (*bench_cmd) return run_bench(be);
    if (*rank_cmd) return run_demo_rank(rk);
    if (*solve_cmd) return run_demo_solve(so);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kShape;
  } catch (const AxisError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kShape;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
