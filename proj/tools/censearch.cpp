#include "censearch/errors.hpp"
#include "censearch/montecarlo.hpp"
#include "censearch/oracle.hpp"
#include "censearch/report.hpp"
#include "censearch/search.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace censearch;

struct Options {
    int n = 0;
    int m = 0;
    double beta = 1.0;
    double k = 1.0;
    std::string criterion = "variance";
    double co = 0.0;
    double cf = 0.0;
    double ct = 0.0;
    std::string proposal = "multinomial";
    long long iters = 10000;
    std::uint64_t seed = 0;
    int chains = 1;
    int workers = 1;
    std::string m1 = "auto";
    std::string trace_path;
    std::uint64_t oracle_budget = kDefaultOracleBudget;
    std::string format = "pretty";
    std::string out_path;
    bool oracle_mode = false;
    std::string scheme_csv;
    long long reps = 5000;
    std::string s_grid = "0.25,0.5,0.75";
};

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        grid.push_back(std::stod(item, &used));
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
            ++used;
        if (used != item.size()) throw UnsupportedValue("bad quantile grid entry: " + item);
    }
    if (grid.empty()) throw UnsupportedValue("empty quantile grid");
    return grid;
}

M1Policy parse_m1(const std::string& text, int m) {
    if (text == "auto") return M1Policy::uniform_random();
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw UnsupportedValue("--m1 expects 'auto' or an integer");
    }
    if (used != text.size()) throw UnsupportedValue("--m1 expects 'auto' or an integer");
    if (value < 1 || value > m) throw UnsupportedValue("--m1 must be in [1, m]");
    return M1Policy::fixed_value(value);
}

CriterionSpec make_criterion(const Options& opt, const CLI::App& app) {
    const bool any_cost = app.count("--co") || app.count("--cf") || app.count("--ct");
    if (opt.criterion == "cost") {
        if (!(app.count("--co") && app.count("--cf") && app.count("--ct")))
            throw UnsupportedValue("--criterion cost requires --co, --cf and --ct");
        return CriterionSpec::cost(CostCoefficients::validate(opt.co, opt.cf, opt.ct));
    }
    if (any_cost)
        throw UnsupportedValue("cost coefficients are only valid with --criterion cost");
    return CriterionSpec::variance();
}

SearchConfig make_search_config(const Options& opt, const CriterionSpec& criterion) {
    SearchConfig config;
    config.n = opt.n;
    config.m = opt.m;
    config.params = WeibullParams::validate(opt.beta, opt.k);
    config.criterion = criterion;
    config.proposal = *proposal_from_string(opt.proposal);
    config.iterations = opt.iters;
    config.seed = opt.seed;
    config.m1 = parse_m1(opt.m1, opt.m);
    config.trace = !opt.trace_path.empty();
    return config;
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw UnsupportedValue("cannot open output file: " + path);
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

Record common_fields(const std::string& command, const Options& opt) {
    return {
        Field::text("command", command),
        Field::integer("n", opt.n),
        Field::integer("m", opt.m),
        Field::number("beta", opt.beta, format_pretty(opt.beta)),
        Field::number("k", opt.k, format_pretty(opt.k)),
        Field::text("criterion", opt.criterion),
        Field::text("seed", std::to_string(opt.seed)),
    };
}

void append_scheme(Record& record, const std::string& key, const Scheme& scheme) {
    record.push_back(Field::text(key, to_csv_string(scheme), to_run_length_string(scheme)));
}

int run_oracle(const Options& opt, const CriterionSpec& criterion, Output& output) {
    const auto params = WeibullParams::validate(opt.beta, opt.k);
    const OracleResult result = exhaustive_search(opt.n, opt.m, params, criterion,
                                                  opt.oracle_budget, opt.workers);
    Record record = common_fields("oracle", opt);
    record.push_back(Field::text("proposal", "exhaustive"));
    const auto evaluated = static_cast<long long>(result.evaluated);
    record.push_back(Field::integer("iterations", evaluated));
    record.push_back(Field::integer("chains", 1));
    append_scheme(record, "best_scheme", result.best_scheme);
    record.push_back(Field::number("best_psi", result.best_psi,
                                   format_pretty(result.best_psi)));
    record.push_back(Field::integer("n_it", evaluated));
    record.push_back(Field::integer("n_ac", 0));
    record.push_back(Field::boolean("extended_precision", result.extended_precision));
    write_records(output.stream(), *format_from_string(opt.format), {record});
    return 0;
}

int run_search_cmd(const Options& opt, const CriterionSpec& criterion, Output& output) {
    if (opt.oracle_mode) return run_oracle(opt, criterion, output);
    const SearchConfig config = make_search_config(opt, criterion);
    if (config.trace && opt.chains != 1)
        throw UnsupportedValue("--trace requires --chains 1");

    const MultiSearchReport multi = run_search_chains(config, opt.chains, opt.workers);
    long long n_it = 0, n_ac = 0;
    bool extended = false;
    for (const auto& chain : multi.chains) {
        n_it += chain.n_it;
        n_ac += chain.n_ac;
        extended = extended || chain.extended_precision;
    }
    const SearchReport& best = multi.best();

    Record record = common_fields("search", opt);
    record.push_back(Field::text("proposal", opt.proposal));
    record.push_back(Field::integer("iterations", opt.iters));
    record.push_back(Field::integer("chains", opt.chains));
    append_scheme(record, "best_scheme", best.best_scheme);
    record.push_back(Field::number("best_psi", best.best_psi,
                                   format_pretty(best.best_psi)));
    record.push_back(Field::integer("n_it", n_it));
    record.push_back(Field::integer("n_ac", n_ac));
    record.push_back(Field::boolean("extended_precision", extended));
    write_records(output.stream(), *format_from_string(opt.format), {record});

    if (config.trace) {
        std::ofstream trace_file(opt.trace_path);
        if (!trace_file)
            throw UnsupportedValue("cannot open trace file: " + opt.trace_path);
        write_trace(trace_file, best.trace);
    }
    return 0;
}

int run_compare(const Options& opt, const CriterionSpec& criterion, Output& output) {
    const auto params = WeibullParams::validate(opt.beta, opt.k);
    const OracleResult oracle = exhaustive_search(opt.n, opt.m, params, criterion,
                                                  opt.oracle_budget, opt.workers);
    SearchConfig config = make_search_config(opt, criterion);
    config.trace = false;
    const MultiSearchReport multi = run_search_chains(config, opt.chains, opt.workers);
    long long n_it = 0, n_ac = 0;
    for (const auto& chain : multi.chains) {
        n_it += chain.n_it;
        n_ac += chain.n_ac;
    }
    const SearchReport& best = multi.best();
    const double r_eff1 = relative_efficiency(oracle.best_psi, best.best_psi);

    Record record = common_fields("compare", opt);
    record.push_back(Field::text("proposal", opt.proposal));
    record.push_back(Field::integer("iterations", opt.iters));
    record.push_back(Field::integer("chains", opt.chains));
    append_scheme(record, "oracle_scheme", oracle.best_scheme);
    record.push_back(Field::number("oracle_psi", oracle.best_psi,
                                   format_pretty(oracle.best_psi)));
    record.push_back(Field::integer("n_it", n_it));
    record.push_back(Field::integer("n_ac", n_ac));
    append_scheme(record, "search_scheme", best.best_scheme);
    record.push_back(Field::number("search_psi", best.best_psi,
                                   format_pretty(best.best_psi)));
    record.push_back(Field::number("r_eff1", r_eff1, format_pretty(r_eff1)));
    write_records(output.stream(), *format_from_string(opt.format), {record});
    return 0;
}

int run_validate(const Options& opt, const CriterionSpec&, Output& output) {
    if (opt.scheme_csv.empty())
        throw UnsupportedValue("validate requires --scheme R1,...,Rm");
    const Scheme scheme = parse_scheme(opt.n, opt.m, opt.scheme_csv);
    const auto params = WeibullParams::validate(opt.beta, opt.k);
    const auto rows = empirical_variance_check(scheme, params, parse_grid(opt.s_grid),
                                               opt.reps, Rng(opt.seed), opt.workers);
    write_variance_rows(output.stream(), *format_from_string(opt.format), rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Optimal progressive Type-II censoring schemes: accept/reject search, "
                 "exhaustive oracle, and Monte-Carlo validation for Weibull lifetimes"};
    app.set_config("--config", "", "Flat key=value file supplying any flag");
    app.add_option("--n", opt.n, "Units on test")->required();
    app.add_option("--m", opt.m, "Observed failures")->required();
    app.add_option("--beta", opt.beta, "Weibull shape")->capture_default_str();
    app.add_option("--k", opt.k, "Weibull scale")->capture_default_str();
    app.add_option("--criterion", opt.criterion, "Criterion to minimize")
        ->check(CLI::IsMember({"variance", "cost"}))
        ->capture_default_str();
    app.add_option("--co", opt.co, "Cost: fixed overhead");
    app.add_option("--cf", opt.cf, "Cost: per observed failure");
    app.add_option("--ct", opt.ct, "Cost: per unit of test duration");
    app.add_option("--proposal", opt.proposal, "Candidate generator")
        ->check(CLI::IsMember({"multinomial", "uniform", "mvhg"}))
        ->capture_default_str();
    app.add_option("--iters", opt.iters, "Proposal steps per chain")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", opt.seed, "RNG seed")
        ->envname("CENSEARCH_SEED")
        ->capture_default_str();
    app.add_option("--chains", opt.chains, "Independent search chains")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--workers", opt.workers, "Max concurrent threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--m1", opt.m1, "Positions per partial update: auto or an integer")
        ->capture_default_str();
    app.add_option("--trace", opt.trace_path, "Write the per-iteration trace to this file");
    app.add_option("--oracle-budget", opt.oracle_budget,
                   "Max schemes the oracle may enumerate")
        ->capture_default_str();
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "jsonl", "pretty"}))
        ->capture_default_str();
    app.add_option("--out", opt.out_path, "Write the report here instead of stdout");
    app.add_option("--scheme", opt.scheme_csv, "Removal counts R1,...,Rm (validate)");
    app.add_option("--reps", opt.reps, "Monte-Carlo replications (validate)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--s-grid", opt.s_grid, "Quantile levels for validate")
        ->capture_default_str();
    const auto print_config =
        app.add_flag("--print-config", "Echo the resolved configuration to stdout");

    auto* search_cmd =
        app.add_subcommand("search", "Accept/reject search for a low-psi scheme");
    search_cmd->add_flag("--oracle", opt.oracle_mode,
                         "Exhaustive enumeration instead of the chain");
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive search over CS(n, m)");
    auto* compare_cmd =
        app.add_subcommand("compare", "Oracle and search side by side with R.eff");
    auto* validate_cmd = app.add_subcommand(
        "validate", "Monte-Carlo check of the asymptotic variance at --scheme");
    for (auto* cmd : {search_cmd, oracle_cmd, compare_cmd, validate_cmd})
        cmd->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (*print_config) {
        std::cout << "command=" << app.get_subcommands().front()->get_name() << '\n'
                  << app.config_to_str(true, false);
    }

    try {
        const CriterionSpec criterion = make_criterion(opt, app);
        Output output(opt.out_path);
        if (search_cmd->parsed()) return run_search_cmd(opt, criterion, output);
        if (oracle_cmd->parsed()) return run_oracle(opt, criterion, output);
        if (compare_cmd->parsed()) return run_compare(opt, criterion, output);
        return run_validate(opt, criterion, output);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n\nSee --help for usage.\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
