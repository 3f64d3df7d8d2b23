// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pds/assign.hpp"
#include "pds/baselines.hpp"
#include "pds/distill.hpp"
#include "pds/error.hpp"
#include "pds/evalkit.hpp"
#include "pds/probe.hpp"
#include "pds/prototype.hpp"
#include "pds/synthgen.hpp"

namespace pds::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct TrainData {
  std::string img, txt, pairs;

  void add(CLI::App* app, bool required) {
    auto* a = app->add_option("--img", img, "image embeddings (EMB1)");
    auto* b = app->add_option("--txt", txt, "caption embeddings (EMB1)");
    auto* c = app->add_option("--pairs", pairs, "pair manifest (TSV)");
    if (required) {
      a->required();
      b->required();
      c->required();
    }
  }
  bool given() const { return !img.empty() && !txt.empty() && !pairs.empty(); }
};

struct Dataset {
  EmbeddingMatrix img, txt;
  PairTable pairs;
  std::vector<PairRows> rows;
};

Dataset load(const TrainData& paths) {
  Dataset d;
  d.img = read_embeddings(paths.img);
  d.txt = read_embeddings(paths.txt);
  d.pairs = read_pairs(paths.pairs);
  d.rows = resolve_pairs(d.pairs, d.img, d.txt);
  return d;
}

struct ClusterFlags {
  std::size_t m = 100;
  double prune = kDefaultPruneRatio;
  std::string mode = "separate";
  std::string init = "kmeans++";
  std::string pairless = "auto";
  std::size_t batch_size = 0;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--m", m, "number of clusters / distilled pairs")->check(CLI::PositiveNumber);
    app->add_option("--prune", prune, "fraction of lowest-similarity pairs dropped")
        ->check(CLI::Range(0.0, 0.999999));
    app->add_option("--mode", mode, "separate | joint")->check(CLI::IsMember({"separate", "joint"}));
    app->add_option("--init", init, "kmeans++ | random-points")
        ->check(CLI::IsMember({"kmeans++", "random-points"}));
    app->add_option("--pairless", pairless, "keep | discard | auto")
        ->check(CLI::IsMember({"keep", "discard", "auto"}));
    app->add_option("--batch-size", batch_size, "mini-batch size (0 = min(1024, N))");
    app->add_option("--max-iters", max_iters, "mini-batch iterations")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "seed for every random choice");
  }

  DistillConfig config() const {
    DistillConfig c;
    c.m = m;
    c.prune_ratio = prune;
    c.cluster.k = m;
    c.cluster.batch_size = batch_size;
    c.cluster.max_iters = max_iters;
    c.cluster.seed = seed;
    c.cluster.mode = parse_cluster_mode(mode);
    c.cluster.init = parse_cluster_init(init);
    if (pairless != "auto") c.pairless = parse_pairless_mode(pairless);
    return c;
  }

  ojson echo() const {
    ojson j;
    j["m"] = m;
    j["prune"] = prune;
    j["mode"] = mode;
    j["init"] = init;
    j["pairless"] = pairless;
    j["batch_size"] = batch_size;
    j["max_iters"] = max_iters;
    j["seed"] = seed;
    return j;
  }
};

struct ProbeFlags {
  TrainConfig config;

  void add(CLI::App* app) {
    app->add_option("--epochs", config.epochs, "probe training epochs")->check(CLI::PositiveNumber);
    app->add_option("--probe-batch", config.batch_size, "probe batch size (0 = min(64, N))");
    app->add_option("--lr", config.learning_rate, "probe learning rate");
    app->add_option("--temperature", config.temperature, "InfoNCE temperature");
    app->add_option("--proj-dim", config.projection_dims, "projection dimension")
        ->check(CLI::PositiveNumber);
  }
};

ojson match_json(const DistillResult& r, const ClusterFlags& flags, bool inspect) {
  ojson j;
  j["config"] = flags.echo();
  j["pairs_total"] = r.pair_rows.size();
  j["pairs_kept"] = r.pruned.kept_pair_indices.size();
  j["match"] = to_json(r.match);
  j["pairless_matches"] = r.prototypes.pairless_matches;
  j["pairless_mode"] = to_string(r.prototypes.pairless_mode);
  j["image_inertia"] = r.img_model.inertia;
  j["text_inertia"] = r.txt_model.inertia;
  auto protos = ojson::array();
  for (const auto& p : r.prototypes.entries) {
    ojson e;
    e["proto_id"] = p.proto_id;
    e["image_cluster"] = p.image_cluster;
    e["text_cluster"] = p.text_cluster;
    e["retained_pairs"] = p.retained_pair_count;
    e["source"] = to_string(p.source);
    e["caption_id"] = p.retrieved_caption_id;
    protos.push_back(std::move(e));
  }
  j["prototypes"] = std::move(protos);
  if (inspect) j["cost"] = to_json(r.cost);
  return j;
}

std::string alignment_csv(const PrototypeSet& protos) {
  std::ostringstream out;
  out << "proto_id,source,retained_pairs,cosine\n";
  auto cos = prototype_alignment_report(protos);
  for (std::size_t e = 0; e < protos.entries.size(); ++e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", cos[e]);
    out << protos.entries[e].proto_id << ',' << to_string(protos.entries[e].source) << ','
        << protos.entries[e].retained_pair_count << ',' << buf << '\n';
  }
  return out.str();
}

void write_json(const fs::path& path, const ojson& j) { write_file(path, j.dump(2) + "\n"); }

// ---- distill ---------------------------------------------------------------

struct DistillCmd {
  TrainData data;
  ClusterFlags cluster;
  GenerationParams gen;
  std::string out;
};

int cmd_distill(const DistillCmd& cmd, std::ostream& log) {
  Dataset d = load(cmd.data);
  DistillResult r = distill(d.img, d.txt, d.pairs, cmd.cluster.config());
  GenerationParams gen = cmd.gen;
  gen.seed = cmd.cluster.seed;
  GenerationManifest manifest = emit_manifest(r.prototypes, gen);

  fs::create_directories(cmd.out);
  const fs::path dir(cmd.out);
  write_embeddings(r.prototypes.image_matrix(), dir / "prototypes_img.emb");
  write_embeddings(r.prototypes.text_matrix(), dir / "prototypes_txt.emb");
  write_json(dir / "match.json", match_json(r, cmd.cluster, false));
  write_manifest(manifest, dir / "gen_manifest.jsonl");
  write_file(dir / "alignment.csv", alignment_csv(r.prototypes));
  log << "distilled " << r.pair_rows.size() << " pairs (" << r.pruned.kept_pair_indices.size()
      << " kept) into " << r.prototypes.entries.size() << " prototypes, "
      << r.prototypes.pairless_matches << " pairless\n";
  return 0;
}

// ---- match -----------------------------------------------------------------

struct MatchCmd {
  TrainData data;
  ClusterFlags cluster;
  std::string cost;
  bool inspect = false;
  std::string out;
};

int cmd_match(const MatchCmd& cmd, std::ostream& log) {
  fs::create_directories(cmd.out);
  const fs::path dir(cmd.out);
  if (!cmd.cost.empty()) {
    CostMatrix cost;
    try {
      cost = cost_matrix_from_json(nlohmann::json::parse(read_file(cmd.cost)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_field, std::string("cost file is not JSON: ") + e.what());
    }
    ojson j;
    j["match"] = to_json(solve_assignment(cost));
    if (cmd.inspect) j["cost"] = to_json(cost);
    write_json(dir / "match.json", j);
    log << "solved " << cost.m << "x" << cost.m << " assignment\n";
    return 0;
  }
  if (!cmd.data.given()) throw Error(Errc::invalid_argument, "need --cost or --img/--txt/--pairs");
  Dataset d = load(cmd.data);
  DistillResult r = distill(d.img, d.txt, d.pairs, cmd.cluster.config());
  write_json(dir / "match.json", match_json(r, cmd.cluster, cmd.inspect));
  log << "matched " << r.match.permutation.size() << " cluster pairs, total shared "
      << -r.match.total_cost << "\n";
  return 0;
}

// ---- select ----------------------------------------------------------------

struct SelectCmd {
  TrainData data;
  std::string method;
  std::size_t budget = 100;
  double lang_threshold = kDefaultLangThreshold;
  std::string reference;
  std::size_t clusters = 50;
  std::uint64_t seed = 0;
  std::string out;
};

Selection run_selection(const SelectCmd& cmd, const Dataset& d) {
  EmbeddingMatrix img = l2_normalize(d.img);
  EmbeddingMatrix txt = l2_normalize(d.txt);
  auto sims = pair_similarities(img, txt, d.rows);
  switch (parse_selection_method(cmd.method)) {
    case SelectionMethod::herding: return herding_select(pair_features(img, txt, d.rows), cmd.budget);
    case SelectionMethod::kcenter: return kcenter_select(pair_features(img, txt, d.rows), cmd.budget);
    case SelectionMethod::clip_score: return clip_score_select(sims, cmd.budget);
    case SelectionMethod::laion: return laion_select(d.pairs, sims, cmd.lang_threshold, cmd.budget);
    case SelectionMethod::random: return random_select(d.rows.size(), cmd.budget, cmd.seed);
    case SelectionMethod::image_based: {
      if (cmd.reference.empty())
        throw Error(Errc::invalid_argument, "image_based needs --reference");
      std::vector<std::size_t> rows;
      for (const auto& r : d.rows) rows.push_back(r.image_row);
      EmbeddingMatrix reference = l2_normalize(read_embeddings(cmd.reference));
      return image_based_select(img.gather(rows), reference, sims,
                                std::min(cmd.clusters, d.rows.size()), cmd.budget, cmd.seed);
    }
  }
  throw Error(Errc::invalid_argument, "unknown method");
}

int cmd_select(const SelectCmd& cmd, std::ostream& log) {
  Dataset d = load(cmd.data);
  Selection sel = run_selection(cmd, d);
  fs::create_directories(cmd.out);
  write_json(fs::path(cmd.out) / "selection.json", to_json(sel));
  log << cmd.method << ": selected " << sel.selected_pair_indices.size() << " of " << d.rows.size()
      << " pairs\n";
  for (const auto& w : sel.warnings) log << "warning: " << w << "\n";
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalCmd {
  TrainData train;
  TrainData test;
  std::vector<std::string> distilled;
  std::vector<std::string> selections;
  std::vector<std::size_t> ks{1, 5, 10};
  std::size_t rare = 0;
  ProbeFlags probe;
  std::uint64_t seed = 0;
  std::string out;
};

EvalOptions eval_options(const std::vector<std::size_t>& ks, std::size_t rare, const TestSet& test,
                         const EmbeddingMatrix* train_images) {
  EvalOptions options;
  options.ks = ks;
  if (rare > 0) {
    if (!train_images) throw Error(Errc::invalid_argument, "--rare needs the training set (--img)");
    options.query_images = rare_subset(test.images, l2_normalize(*train_images), rare);
    options.subset = "rare" + std::to_string(rare);
  }
  return options;
}

int cmd_eval(const EvalCmd& cmd, std::ostream& log) {
  if (cmd.distilled.empty() && cmd.selections.empty())
    throw Error(Errc::invalid_argument, "nothing to evaluate: give --distilled or --selection");
  Dataset test_data = load(cmd.test);
  TestSet test = TestSet::from_pairs(test_data.img, test_data.txt, test_data.pairs);

  std::optional<Dataset> train;
  if (cmd.train.given()) train = load(cmd.train);
  if (!cmd.selections.empty() && !train)
    throw Error(Errc::invalid_argument, "--selection needs the training set (--img/--txt/--pairs)");

  EvalOptions options = eval_options(cmd.ks, cmd.rare, test, train ? &train->img : nullptr);
  TrainConfig probe = cmd.probe.config;
  probe.seed = cmd.seed;

  std::vector<RetrievalReport> reports;
  for (const auto& dir : cmd.distilled) {
    EmbeddingMatrix img = read_embeddings(fs::path(dir) / "prototypes_img.emb");
    EmbeddingMatrix txt = read_embeddings(fs::path(dir) / "prototypes_txt.emb");
    EvalOptions o = options;
    o.method = "distilled:" + fs::path(dir).filename().string();
    reports.push_back(evaluate_distilled(img, txt, probe, test, o));
  }
  for (const auto& path : cmd.selections) {
    Selection sel;
    try {
      sel = selection_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_field, std::string("selection file is not JSON: ") + e.what());
    }
    auto [img, txt] = selected_pairs(train->img, train->txt, train->rows, sel);
    EvalOptions o = options;
    o.method = to_string(sel.method);
    reports.push_back(evaluate_distilled(img, txt, probe, test, o));
  }

  fs::create_directories(cmd.out);
  ojson j;
  j["reports"] = ojson::array();
  std::string csv = csv_header(cmd.ks) + "\n";
  for (const auto& r : reports) {
    j["reports"].push_back(to_json(r));
    csv += csv_row(r) + "\n";
    log << r.method << " IR@" << cmd.ks.front() << "=" << r.ir_at.at(cmd.ks.front()) << " TR@"
        << cmd.ks.front() << "=" << r.tr_at.at(cmd.ks.front()) << "\n";
  }
  write_json(fs::path(cmd.out) / "report.json", j);
  write_file(fs::path(cmd.out) / "report.csv", csv);
  return 0;
}

// ---- sweep -----------------------------------------------------------------

struct SweepCmd {
  TrainData train;
  TrainData test;
  ClusterFlags cluster;
  std::vector<std::size_t> ms;
  std::vector<double> prunes;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::size_t> ks{1, 5, 10};
  ProbeFlags probe;
  std::string out;
};

int cmd_sweep(const SweepCmd& cmd, std::ostream& log) {
  Dataset train = load(cmd.train);
  Dataset test_data = load(cmd.test);
  TestSet test = TestSet::from_pairs(test_data.img, test_data.txt, test_data.pairs);
  EvalOptions options = eval_options(cmd.ks, 0, test, nullptr);

  std::vector<std::size_t> ms = cmd.ms.empty() ? std::vector<std::size_t>{cmd.cluster.m} : cmd.ms;
  std::vector<double> prunes = cmd.prunes.empty() ? std::vector<double>{cmd.cluster.prune} : cmd.prunes;

  std::ostringstream csv;
  csv << "m,prune,seed,prototypes,pairless";
  for (std::size_t k : cmd.ks) csv << ",ir@" << k;
  for (std::size_t k : cmd.ks) csv << ",tr@" << k;
  csv << "\n";

  ojson summary = ojson::array();
  for (std::size_t m : ms) {
    for (double prune : prunes) {
      std::map<std::string, std::vector<double>> metrics;
      for (std::uint64_t seed : cmd.seeds) {
        ClusterFlags flags = cmd.cluster;
        flags.m = m;
        flags.prune = prune;
        flags.seed = seed;
        DistillResult r = distill(train.img, train.txt, train.pairs, flags.config());
        TrainConfig probe = cmd.probe.config;
        probe.seed = seed;
        EvalOptions o = options;
        o.method = "pds";
        RetrievalReport rep = evaluate_distilled(r.prototypes.image_matrix(),
                                                 r.prototypes.text_matrix(), probe, test, o);
        csv << m << ',' << prune << ',' << seed << ',' << r.prototypes.entries.size() << ','
            << r.prototypes.pairless_matches;
        for (std::size_t k : cmd.ks) {
          csv << ',' << rep.ir_at.at(k);
          metrics["ir@" + std::to_string(k)].push_back(rep.ir_at.at(k));
        }
        for (std::size_t k : cmd.ks) {
          csv << ',' << rep.tr_at.at(k);
          metrics["tr@" + std::to_string(k)].push_back(rep.tr_at.at(k));
        }
        csv << "\n";
      }
      ojson cell;
      cell["m"] = m;
      cell["prune"] = prune;
      cell["seeds"] = cmd.seeds.size();
      ojson stats;
      for (const auto& [name, values] : metrics) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
        stats[name] = {{"mean", mean}, {"std", sd}};
      }
      cell["metrics"] = std::move(stats);
      log << "m=" << m << " prune=" << prune << " IR@" << cmd.ks.front() << " mean="
          << cell["metrics"]["ir@" + std::to_string(cmd.ks.front())]["mean"].get<double>() << "\n";
      summary.push_back(std::move(cell));
    }
  }
  fs::create_directories(cmd.out);
  write_file(fs::path(cmd.out) / "sweep.csv", csv.str());
  ojson j;
  j["config"] = cmd.cluster.echo();
  j["summary"] = std::move(summary);
  write_json(fs::path(cmd.out) / "report.json", j);
  return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthCmd {
  MixtureSpec spec;
  std::uint64_t geometry_seed = 0;
  bool has_geometry_seed = false;
  std::string out;
};

int cmd_synth(const SynthCmd& cmd, std::ostream& log) {
  MixtureSpec spec = cmd.spec;
  if (cmd.has_geometry_seed) spec.geometry_seed = cmd.geometry_seed;
  SyntheticDataset ds = generate(spec);
  write_dataset(ds, cmd.out);
  log << "wrote " << ds.img.rows() << " images and " << ds.txt.rows() << " captions to " << cmd.out
      << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pds: prototype distillation for paired image-text embeddings"};
  app.require_subcommand(1);

  DistillCmd distill_cmd;
  auto* distill_app = app.add_subcommand("distill", "distill pairs into aligned prototypes");
  distill_cmd.data.add(distill_app, true);
  distill_cmd.cluster.add(distill_app);
  distill_app->add_option("--guidance", distill_cmd.gen.guidance_scale, "guidance scale")
      ->check(CLI::PositiveNumber);
  distill_app->add_option("--steps", distill_cmd.gen.num_steps, "sampling steps")
      ->check(CLI::PositiveNumber);
  distill_app->add_option("--size", distill_cmd.gen.output_size, "output image size")
      ->check(CLI::PositiveNumber);
  distill_app->add_option("--out", distill_cmd.out, "output directory")->required();

  MatchCmd match_cmd;
  auto* match_app = app.add_subcommand("match", "cluster matching only");
  match_cmd.data.add(match_app, false);
  match_cmd.cluster.add(match_app);
  match_app->add_option("--cost", match_cmd.cost, "solve a cost matrix given as JSON instead");
  match_app->add_flag("--inspect", match_cmd.inspect, "include the full cost matrix");
  match_app->add_option("--out", match_cmd.out, "output directory")->required();

  SelectCmd select_cmd;
  auto* select_app = app.add_subcommand("select", "subset-selection baselines");
  select_cmd.data.add(select_app, true);
  select_app->add_option("--method", select_cmd.method, "herding|kcenter|clip_score|laion|image_based|random")
      ->required()
      ->check(CLI::IsMember({"herding", "kcenter", "clip_score", "laion", "image_based", "random"}));
  select_app->add_option("--budget", select_cmd.budget, "pairs to select")->check(CLI::PositiveNumber);
  select_app->add_option("--lang-threshold", select_cmd.lang_threshold, "laion language threshold");
  select_app->add_option("--reference", select_cmd.reference, "reference embeddings for image_based");
  select_app->add_option("--clusters", select_cmd.clusters, "clusters for image_based")
      ->check(CLI::PositiveNumber);
  select_app->add_option("--seed", select_cmd.seed, "seed");
  select_app->add_option("--out", select_cmd.out, "output directory")->required();

  EvalCmd eval_cmd;
  auto* eval_app = app.add_subcommand("eval", "probe training and retrieval evaluation");
  eval_cmd.train.add(eval_app, false);
  eval_app->add_option("--test-img", eval_cmd.test.img, "test image embeddings")->required();
  eval_app->add_option("--test-txt", eval_cmd.test.txt, "test caption embeddings")->required();
  eval_app->add_option("--test-pairs", eval_cmd.test.pairs, "test pair manifest")->required();
  eval_app->add_option("--distilled", eval_cmd.distilled, "distill output directory (repeatable)");
  eval_app->add_option("--selection", eval_cmd.selections, "selection.json (repeatable)");
  eval_app->add_option("--k", eval_cmd.ks, "recall cutoffs")->delimiter(',');
  eval_app->add_option("--rare", eval_cmd.rare, "restrict to the N test images farthest from the train mean");
  eval_cmd.probe.add(eval_app);
  eval_app->add_option("--seed", eval_cmd.seed, "probe seed");
  eval_app->add_option("--out", eval_cmd.out, "output directory")->required();

  SweepCmd sweep_cmd;
  auto* sweep_app = app.add_subcommand("sweep", "distill + eval over m, prune ratios and seeds");
  sweep_cmd.train.add(sweep_app, true);
  sweep_app->add_option("--test-img", sweep_cmd.test.img, "test image embeddings")->required();
  sweep_app->add_option("--test-txt", sweep_cmd.test.txt, "test caption embeddings")->required();
  sweep_app->add_option("--test-pairs", sweep_cmd.test.pairs, "test pair manifest")->required();
  sweep_cmd.cluster.add(sweep_app);
  sweep_app->add_option("--ms", sweep_cmd.ms, "list of m values")->delimiter(',');
  sweep_app->add_option("--prunes", sweep_cmd.prunes, "list of prune ratios")->delimiter(',');
  sweep_app->add_option("--seeds", sweep_cmd.seeds, "list of seeds")->delimiter(',');
  sweep_app->add_option("--k", sweep_cmd.ks, "recall cutoffs")->delimiter(',');
  sweep_cmd.probe.add(sweep_app);
  sweep_app->add_option("--out", sweep_cmd.out, "output directory")->required();

  SynthCmd synth_cmd;
  auto* synth_app = app.add_subcommand("synth", "write a synthetic correlated mixture dataset");
  synth_app->add_option("--components", synth_cmd.spec.n_components, "mixture components");
  synth_app->add_option("--per-component", synth_cmd.spec.points_per_component, "images per component");
  synth_app->add_option("--dim", synth_cmd.spec.dim, "embedding dimension");
  synth_app->add_option("--separation", synth_cmd.spec.component_separation, "center distance");
  synth_app->add_option("--radius", synth_cmd.spec.component_radius, "component radius");
  synth_app->add_option("--noise", synth_cmd.spec.alignment_noise, "caption noise std");
  synth_app->add_option("--misaligned", synth_cmd.spec.misaligned_fraction, "misaligned pair fraction");
  synth_app->add_option("--captions", synth_cmd.spec.captions_per_image, "captions per image");
  synth_app->add_option("--seed", synth_cmd.spec.seed, "sample seed");
  synth_app->add_option("--geometry-seed", synth_cmd.geometry_seed, "center seed (defaults to --seed)");
  synth_app->add_option("--out", synth_cmd.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*distill_app) return cmd_distill(distill_cmd, out);
    if (*match_app) return cmd_match(match_cmd, out);
    if (*select_app) return cmd_select(select_cmd, out);
    if (*eval_app) return cmd_eval(eval_cmd, out);
    if (*sweep_app) return cmd_sweep(sweep_cmd, out);
    if (*synth_app) {
      synth_cmd.has_geometry_seed = synth_app->count("--geometry-seed") > 0;
      return cmd_synth(synth_cmd, out);
    }
  } catch (const Error& e) {
    err << "pds: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "pds: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "pds: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace pds::cli
