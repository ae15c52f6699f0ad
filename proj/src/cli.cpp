// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tokprune/errors.hpp"
#include "tokprune/io.hpp"
#include "tokprune/selectors.hpp"
#include "tokprune/synth.hpp"

namespace tokprune::cli {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<Method> parse_method_list(const std::string& text) {
    std::vector<Method> methods;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto method = parse_method(item);
        if (!method) {
            throw CLI::ValidationError("--methods", "unknown method '" + item + "'");
        }
        methods.push_back(*method);
    }
    if (methods.empty()) {
        throw CLI::ValidationError("--methods", "no methods given");
    }
    return methods;
}

ReferenceMode parse_reference_mode(const std::string& text) {
    return text == "bbox" ? ReferenceMode::uniform_in_bbox : ReferenceMode::resample_from_pool;
}

std::string lambda_text(const std::optional<double>& lambda) {
    return lambda ? io::format_double(*lambda) : std::string("-");
}

void print_point(std::ostream& out, const TradeoffPoint& p) {
    out << "  " << method_name(p.method) << " lambda=" << lambda_text(p.lambda)
        << " hopkins=" << io::format_double(p.hopkins) << " retention=" << io::format_double(p.retention) << "\n";
}

struct SelectArgs {
    std::string features;
    std::string importance;
    std::string method = "mmr";
    std::size_t k = 0;
    double lambda = 0.5;
    double epsilon = default_epsilon;
    double dpp_floor = 0.01;
    std::uint64_t seed = 0;
    std::string out;
    std::string grid;
    std::string mask;
};

struct MetricsArgs {
    std::string features;
    std::string importance;
    std::string selection;
    std::size_t trials = 16;
    std::uint64_t seed = 0;
    std::string reference_mode = "pool";
    std::string out;
};

struct SweepArgs {
    std::string features;
    std::string importance;
    std::size_t k = 0;
    std::string methods = "importance,fps,hybrid,dpp,mmr";
    std::string grid = "0.1:0.9:0.1";
    std::uint64_t seed = 0;
    std::size_t trials = 16;
    std::string out;
};

struct GenArgs {
    std::size_t n = 256;
    std::size_t dim = 32;
    std::size_t clusters = 8;
    double spread = 0.15;
    double center_scale = 1.0;
    bool non_negative = false;
    std::uint64_t seed = 42;
    std::string prefix;
};

struct AnglesArgs {
    std::string features;
    std::size_t bins = 60;
    std::size_t max_pairs = 2'000'000;
    std::uint64_t seed = 0;
    std::string out;
};

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    std::size_t w = 0;
    std::size_t h = 0;
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument(text);
        }
        w = std::stoul(text.substr(0, x));
        h = std::stoul(text.substr(x + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "expected WxH, got '" + text + "'");
    }
    return {w, h};
}

int cmd_select(const SelectArgs& args, std::ostream& out) {
    const auto features = io::read_features(args.features);
    const auto w = io::read_importance(args.importance);
    const auto method = parse_method(args.method);
    SelectorConfig cfg;
    cfg.k = args.k;
    cfg.lambda = args.lambda;
    cfg.epsilon = args.epsilon;
    cfg.dpp_quality_floor = args.dpp_floor;
    cfg.rng_seed = args.seed;

    const auto start = clock_type::now();
    const auto selection = run_selector(*method, features, w, cfg);
    const double wall_ms = elapsed_ms(start);

    const std::string params = "{\"epsilon\": " + io::format_double(cfg.epsilon) + ", \"lambda\": " +
                               io::format_double(cfg.lambda) + ", \"dpp_quality_floor\": " +
                               io::format_double(cfg.dpp_quality_floor) + ", \"seed\": " + std::to_string(cfg.rng_seed) +
                               ", \"n_tokens\": " + std::to_string(features.n_tokens()) + "}";
    io::write_selection(selection, args.out, params);
    if (!args.mask.empty()) {
        const auto [gw, gh] = parse_grid(args.grid);
        if (gw * gh != features.n_tokens()) {
            throw DomainError("mask grid " + args.grid + " does not cover " + std::to_string(features.n_tokens()) +
                              " tokens");
        }
        io::write_mask_pgm(selection, gw, gh, args.mask);
    }
    out << "k=" << selection.k() << " method=" << method_name(selection.method) << " wall_ms=" << wall_ms << "\n";
    return exit_ok;
}

int cmd_metrics(const MetricsArgs& args, std::ostream& out) {
    const auto features = io::read_features(args.features);
    const auto w = io::read_importance(args.importance);
    check_paired(features, w);
    const auto selection = io::read_selection(args.selection);
    HopkinsConfig cfg;
    cfg.rng_seed = args.seed;
    cfg.n_trials = args.trials;
    cfg.reference_mode = parse_reference_mode(args.reference_mode);
    TradeoffPoint point{selection.method, selection.lambda, hopkins_statistic(features, selection, cfg),
                        importance_retention(w, selection)};
    out << "hopkins=" << io::format_double(point.hopkins) << " retention=" << io::format_double(point.retention)
        << "\n";
    if (!args.out.empty()) {
        io::write_sweep_csv({point}, args.out);
    }
    return exit_ok;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    const auto features = io::read_features(args.features);
    const auto w = io::read_importance(args.importance);
    SweepOptions options;
    options.k = args.k;
    options.methods = parse_method_list(args.methods);
    try {
        options.lambda_grid = parse_lambda_grid(args.grid);
    } catch (const DomainError& e) {
        throw CLI::ValidationError("--lambda-grid", e.what());
    }
    options.hopkins.rng_seed = args.seed;
    options.hopkins.n_trials = args.trials;
    const auto points = run_sweep(features, w, options);
    io::write_sweep_csv(points, args.out);
    out << "wrote " << points.size() << " rows to " << args.out << "\n";

    std::vector<TradeoffPoint> mmr_points;
    std::vector<TradeoffPoint> hybrid_points;
    for (const auto& p : points) {
        if (p.method == Method::mmr) {
            mmr_points.push_back(p);
        } else if (p.method == Method::hybrid) {
            hybrid_points.push_back(p);
        }
    }
    if (!mmr_points.empty()) {
        const auto frontier = pareto_frontier(mmr_points);
        out << "mmr pareto frontier (" << frontier.size() << " points):\n";
        for (const auto& p : frontier) {
            print_point(out, p);
        }
        if (!hybrid_points.empty()) {
            const auto report = dominance_report(frontier, hybrid_points);
            out << "mmr frontier vs hybrid: " << report.summary() << "\n";
        }
    }
    return exit_ok;
}

int cmd_gen(const GenArgs& args, std::ostream& out) {
    ManifoldSpec spec;
    spec.n_tokens = args.n;
    spec.dim = args.dim;
    spec.n_clusters = args.clusters;
    spec.cluster_spread = args.spread;
    spec.center_scale = args.center_scale;
    spec.non_negative = args.non_negative;
    spec.rng_seed = args.seed;
    const auto manifold = generate_manifold(spec);
    io::write_features(manifold.features, args.prefix + ".fmat");
    io::write_importance(manifold.importance, args.prefix + ".fvec");
    std::string labels = "token,label\n";
    for (std::size_t i = 0; i < manifold.cluster_labels.size(); ++i) {
        labels += std::to_string(i) + "," + std::to_string(manifold.cluster_labels[i]) + "\n";
    }
    io::write_file_atomic(args.prefix + ".labels.csv", labels);
    out << "wrote " << args.prefix << ".{fmat,fvec,labels.csv} n=" << args.n << " dim=" << args.dim
        << " regenerated_rows=" << manifold.regenerated_rows << "\n";
    return exit_ok;
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    const auto report = run_bench(options);
    if (!report.outputs_equal) {
        err << "error: select_mmr and select_mmr_naive disagree\n";
        return exit_data_error;
    }
    out << "n=" << options.n_tokens << " dim=" << options.dim << " k=" << options.k << " reps=" << options.reps
        << "\n";
    out << "outputs_equal=true\n";
    out << "fast_median_ms=" << report.fast_median_ms << "\n";
    out << "naive_median_ms=" << report.naive_median_ms << "\n";
    out << "speedup=" << report.speedup() << "\n";
    return exit_ok;
}

int cmd_angles(const AnglesArgs& args, std::ostream& out) {
    const auto features = io::read_features(args.features);
    const auto hist = angle_histogram(features, args.bins, args.max_pairs, args.seed);
    std::string text = "bin_low_deg,bin_high_deg,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        text += io::format_double(hist.bin_edges_deg[b]) + "," + io::format_double(hist.bin_edges_deg[b + 1]) + "," +
                std::to_string(hist.counts[b]) + "\n";
    }
    text += "mass_above_90=" + io::format_double(hist.mass_above_90) + "\n";
    io::write_file_atomic(args.out, text);
    out << "pairs=" << hist.n_pairs << " mass_above_90=" << io::format_double(hist.mass_above_90) << "\n";
    return exit_ok;
}

}  // namespace

std::vector<double> parse_lambda_grid(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw DomainError("lambda grid must look like start:stop:step");
    }
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    try {
        start = std::stod(std::string(text.substr(0, first)));
        stop = std::stod(std::string(text.substr(first + 1, second - first - 1)));
        step = std::stod(std::string(text.substr(second + 1)));
    } catch (const std::exception&) {
        throw DomainError("lambda grid must look like start:stop:step");
    }
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop && step > 0.0)) {
        throw DomainError("lambda grid needs 0 <= start <= stop <= 1 and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return grid;
}

std::vector<TradeoffPoint> run_sweep(const FeatureMatrix& features, const ImportanceVector& w,
                                     const SweepOptions& options) {
    check_paired(features, w);
    struct Cell {
        Method method;
        std::optional<double> lambda;
    };
    std::vector<Cell> cells;
    for (Method m : options.methods) {
        if (method_uses_lambda(m)) {
            for (double lambda : options.lambda_grid) {
                cells.push_back({m, lambda});
            }
        } else {
            cells.push_back({m, std::nullopt});
        }
    }

    // Cells are independent; results are gathered in cell order.
    std::vector<std::future<TradeoffPoint>> futures;
    for (const auto& cell : cells) {
        futures.push_back(std::async(std::launch::async, [&, cell] {
            SelectorConfig cfg;
            cfg.k = options.k;
            cfg.lambda = cell.lambda.value_or(0.5);
            cfg.rng_seed = options.hopkins.rng_seed;
            const auto selection = run_selector(cell.method, features, w, cfg);
            return TradeoffPoint{cell.method, cell.lambda, hopkins_statistic(features, selection, options.hopkins),
                                 importance_retention(w, selection)};
        }));
    }
    std::vector<TradeoffPoint> points;
    for (auto& f : futures) {
        points.push_back(f.get());
    }
    return points;
}

BenchReport run_bench(const BenchOptions& options) {
    ManifoldSpec spec;
    spec.n_tokens = options.n_tokens;
    spec.dim = options.dim;
    spec.n_clusters = std::min<std::size_t>(16, options.n_tokens);
    spec.rng_seed = options.seed;
    const auto manifold = generate_manifold(spec);
    SelectorConfig cfg;
    cfg.k = options.k;
    cfg.lambda = options.lambda;

    BenchReport report;
    const auto fast = select_mmr(manifold.features, manifold.importance, cfg);
    const auto naive = select_mmr_naive(manifold.features, manifold.importance, cfg);
    report.outputs_equal = fast.indices == naive.indices && fast.step_scores == naive.step_scores;
    if (!report.outputs_equal) {
        return report;
    }

    std::vector<double> fast_ms;
    std::vector<double> naive_ms;
    for (std::size_t r = 0; r < options.reps; ++r) {
        auto start = clock_type::now();
        const auto a = select_mmr(manifold.features, manifold.importance, cfg);
        fast_ms.push_back(elapsed_ms(start));
        start = clock_type::now();
        const auto b = select_mmr_naive(manifold.features, manifold.importance, cfg);
        naive_ms.push_back(elapsed_ms(start));
        report.outputs_equal = report.outputs_equal && a.indices == b.indices;
    }
    report.fast_median_ms = median(fast_ms);
    report.naive_median_ms = median(naive_ms);
    return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Importance- and diversity-aware token pruning"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "Select K tokens and write a selection document");
    select->add_option("--features", select_args.features, "Feature matrix (.fmat or .csv)")->required();
    select->add_option("--importance", select_args.importance, "Importance vector (.fvec or .csv)")->required();
    select->add_option("--method", select_args.method, "Strategy")
        ->check(CLI::IsMember({"importance", "fps", "hybrid", "mmr", "mmr-naive", "dpp"}));
    select->add_option("--k", select_args.k, "Budget")->required()->check(CLI::PositiveNumber);
    select->add_option("--lambda", select_args.lambda, "Importance/diversity weight")->check(CLI::Range(0.0, 1.0));
    select->add_option("--epsilon", select_args.epsilon, "Min-max normalization epsilon")
        ->check(CLI::PositiveNumber);
    select->add_option("--dpp-floor", select_args.dpp_floor, "DPP quality floor")->check(CLI::NonNegativeNumber);
    select->add_option("--seed", select_args.seed, "RNG seed");
    select->add_option("--out", select_args.out, "Selection document path")->required();
    auto* grid_opt = select->add_option("--grid", select_args.grid, "Token grid WxH for --mask");
    select->add_option("--mask", select_args.mask, "Write a PGM selection mask")->needs(grid_opt);

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "Hopkins statistic and importance retention of a selection");
    metrics->add_option("--features", metrics_args.features, "Feature matrix")->required();
    metrics->add_option("--importance", metrics_args.importance, "Importance vector")->required();
    metrics->add_option("--selection", metrics_args.selection, "Selection document")->required();
    metrics->add_option("--hopkins-trials", metrics_args.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    metrics->add_option("--seed", metrics_args.seed, "RNG seed");
    metrics->add_option("--reference-mode", metrics_args.reference_mode, "Hopkins reference sampling")
        ->check(CLI::IsMember({"pool", "bbox"}));
    metrics->add_option("--out", metrics_args.out, "Optional CSV row output");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Trade-off sweep over methods and lambda");
    sweep->add_option("--features", sweep_args.features, "Feature matrix")->required();
    sweep->add_option("--importance", sweep_args.importance, "Importance vector")->required();
    sweep->add_option("--k", sweep_args.k, "Budget")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--methods", sweep_args.methods, "Comma-separated methods");
    sweep->add_option("--lambda-grid", sweep_args.grid, "start:stop:step");
    sweep->add_option("--seed", sweep_args.seed, "RNG seed");
    sweep->add_option("--hopkins-trials", sweep_args.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_args.out, "Sweep CSV path")->required();

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic clustered token manifold");
    gen->add_option("--n", gen_args.n, "Tokens")->check(CLI::PositiveNumber);
    gen->add_option("--dim", gen_args.dim, "Dimensions")->check(CLI::PositiveNumber);
    gen->add_option("--clusters", gen_args.clusters, "Clusters")->check(CLI::PositiveNumber);
    gen->add_option("--spread", gen_args.spread, "Within-cluster std dev")->check(CLI::PositiveNumber);
    gen->add_option("--center-scale", gen_args.center_scale, "Cluster center magnitude")->check(CLI::PositiveNumber);
    gen->add_flag("--non-negative", gen_args.non_negative, "Shift features into the non-negative orthant");
    gen->add_option("--seed", gen_args.seed, "RNG seed");
    gen->add_option("--out-prefix", gen_args.prefix, "Output prefix")->required();

    BenchOptions bench_args;
    auto* bench = app.add_subcommand("bench", "Time incremental MMR against the naive reference");
    bench->add_option("--n", bench_args.n_tokens, "Tokens")->check(CLI::PositiveNumber);
    bench->add_option("--dim", bench_args.dim, "Dimensions")->check(CLI::PositiveNumber);
    bench->add_option("--k", bench_args.k, "Budget")->check(CLI::PositiveNumber);
    bench->add_option("--reps", bench_args.reps, "Timed repetitions")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_args.seed, "RNG seed");
    bench->add_option("--lambda", bench_args.lambda, "MMR lambda")->check(CLI::Range(0.0, 1.0));

    AnglesArgs angles_args;
    auto* angles = app.add_subcommand("angles", "Histogram of pairwise token angles");
    angles->add_option("--features", angles_args.features, "Feature matrix")->required();
    angles->add_option("--bins", angles_args.bins, "Bins over [0, 180] degrees")->check(CLI::PositiveNumber);
    angles->add_option("--max-pairs", angles_args.max_pairs, "Subsample above this many pairs")
        ->check(CLI::PositiveNumber);
    angles->add_option("--seed", angles_args.seed, "RNG seed for pair subsampling");
    angles->add_option("--out", angles_args.out, "Histogram CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage_error;
    }

    try {
        if (*select) {
            if (!select_args.mask.empty()) {
                parse_grid(select_args.grid);
            }
            return cmd_select(select_args, out);
        }
        if (*metrics) {
            return cmd_metrics(metrics_args, out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_args, out);
        }
        if (*gen) {
            return cmd_gen(gen_args, out);
        }
        if (*bench) {
            return cmd_bench(bench_args, out, err);
        }
        if (*angles) {
            return cmd_angles(angles_args, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_data_error;
    }
    return exit_usage_error;
}

}  // namespace tokprune::cli
