#include "lentparticle/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lentparticle/harness.hpp"
#include "lentparticle/lent_particle.hpp"
#include "lentparticle/parallel.hpp"
#include "lentparticle/rng.hpp"

namespace lp::cli {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '[' || c == ']') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const std::string s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("invalid value '" + text + "' for " + key);
    }
    return value;
}

std::vector<double> parse_coeffs(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_number<double>(key, item));
    if (out.empty()) throw ConfigError("empty coefficient list for " + key);
    return out;
}

bool looks_numeric(const std::string& text) {
    const std::string s = trim(text);
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' || s[0] == '+' || s[0] == '.');
}

void set_phi(Settings& s, const std::string& value) {
    if (looks_numeric(value)) {
        s.phi_coeffs = parse_coeffs("phi", value);
    } else {
        s.phi_name = trim(value);
        s.phi_coeffs.clear();
    }
}

void assign(Settings& s, const std::string& key, const std::string& value) {
    if (key == "measure.name") s.measure = value;
    else if (key == "measure.alpha") s.alpha = parse_number<double>(key, value);
    else if (key == "measure.trunc_a") s.trunc_a = parse_number<double>(key, value);
    else if (key == "measure.trunc_b") s.trunc_b = parse_number<double>(key, value);
    else if (key == "measure.intensity") s.intensity = parse_number<double>(key, value);
    else if (key == "experiment.T") s.horizon = parse_number<double>(key, value);
    else if (key == "experiment.n_paths") s.n_paths = parse_number<std::size_t>(key, value);
    else if (key == "experiment.n_marks") s.n_marks = parse_number<std::size_t>(key, value);
    else if (key == "experiment.n_mark_paths") s.n_mark_paths = parse_number<std::size_t>(key, value);
    else if (key == "experiment.n_pathwise") s.n_pathwise = parse_number<std::size_t>(key, value);
    else if (key == "experiment.n_inner") s.n_inner = parse_number<std::size_t>(key, value);
    else if (key == "experiment.seed") s.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "experiment.z_max") s.z_max = parse_number<double>(key, value);
    else if (key == "experiment.jobs") s.jobs = parse_number<unsigned>(key, value);
    else if (key == "experiment.bins") s.bins = parse_number<std::size_t>(key, value);
    else if (key == "functional.family") s.family = value;
    else if (key == "functional.phi_name") {
        s.phi_name = value;
        s.phi_coeffs.clear();
    } else if (key == "functional.phi_coeffs") s.phi_coeffs = parse_coeffs(key, value);
    else if (key == "output.dir") s.output_dir = value;
    else if (key == "output.formats") s.formats = split_list(value);
    else if (key == "verify.checks") s.checks = split_list(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

bool wants(const Settings& s, const std::string& format) {
    return std::find(s.formats.begin(), s.formats.end(), format) != s.formats.end();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

void prepare_output_dir(const Settings& s) {
    std::error_code ec;
    std::filesystem::create_directories(s.output_dir, ec);
    if (ec || !std::filesystem::is_directory(s.output_dir)) {
        throw ConfigError("cannot create output directory " + s.output_dir.string());
    }
}

RunContext context(const Settings& s) { return {s.seed, s.jobs, s.z_max}; }

// Interior test functions scaled to the positive support interval [a, b].
struct InteriorFunctions {
    ScalarTestFunction f;
    ScalarTestFunction g;
    ScalarTestFunction h;
};

InteriorFunctions interior_functions(const JumpMeasureSpec& spec) {
    const Interval iv = spec.support().back();
    const double a = iv.lo;
    const double len = iv.length();
    return {fn::bump(a + 0.5 * len, 0.4 * len), fn::bump(a + 0.4 * len, 0.3 * len),
            fn::bump(a + 0.6 * len, 0.35 * len)};
}

using CheckRunner = std::function<std::vector<EstimateReport>(const Settings&)>;

std::vector<std::pair<std::string, CheckRunner>> catalogue() {
    std::vector<std::pair<std::string, CheckRunner>> c;
    c.emplace_back("isometry", [](const Settings& s) {
        return std::vector{check_isometry(fn::identity(), make_measure(s), s.horizon, s.n_paths, context(s))};
    });
    c.emplace_back("integration-by-parts", [](const Settings& s) {
        const auto spec = make_measure(s);
        const auto fns = interior_functions(*spec);
        return std::vector{check_integration_by_parts(fns.f, fns.h, spec, s.horizon, s.n_paths, context(s))};
    });
    c.emplace_back("marked-isometry", [](const Settings& s) {
        return std::vector{check_marked_isometry(kernels::path_weighted_eta(), make_measure(s), s.horizon, s.n_mark_paths,
                                        s.n_marks, context(s))};
    });
    c.emplace_back("second-moment", [](const Settings& s) {
        return std::vector{check_second_moment_identity(kernels::size_times_mark(), make_measure(s), s.horizon,
                                                        s.n_mark_paths, s.n_marks, context(s))};
    });
    c.emplace_back("creation", [](const Settings& s) {
        const auto spec = make_measure(s);
        return std::vector{check_creation_identity(kernels::squared_size_times_linear_squared(fn::identity(), *spec, s.horizon),
                                     spec, s.horizon, s.n_paths, s.n_inner, context(s))};
    });
    c.emplace_back("sharp-bilinear", [](const Settings& s) {
        const auto spec = make_measure(s);
        const auto fns = interior_functions(*spec);
        return std::vector{
            check_sharp_bilinear(fns.f, fns.g, spec, s.horizon, s.n_mark_paths, s.n_marks, context(s))};
    });
    c.emplace_back("generator", [](const Settings& s) {
        const auto spec = make_measure(s);
        const auto fns = interior_functions(*spec);
        return std::vector{check_generator_identity(fns.f, fns.g, spec, s.horizon, s.n_paths, context(s))};
    });
    c.emplace_back("gamma-linear", [](const Settings& s) {
        const auto spec = make_measure(s);
        const auto fns = interior_functions(*spec);
        const std::vector<ScalarTestFunction> fs = {fn::identity(), fn::builtin("square"), fn::builtin("cubic"),
                                                    fn::sigmoid(3.0), fns.f};
        return std::vector{check_gamma_linear(fs, spec, s.horizon, s.n_pathwise, context(s))};
    });
    c.emplace_back("mark-laws", [](const Settings& s) {
        const auto spec = make_measure(s);
        const RealFunctional F = make_functional(s, *spec);
        EstimateReport uniform =
            check_mark_laws(F, spec, s.horizon, s.n_mark_paths, s.n_marks, MarkLaw::uniform_eta, context(s));
        EstimateReport gaussian =
            check_mark_laws(F, spec, s.horizon, s.n_mark_paths, s.n_marks, MarkLaw::gaussian, context(s));
        EstimateReport invariance;
        invariance.name = "mark-law-invariance";
        invariance.lhs_estimate = uniform.rhs_estimate;
        invariance.rhs_estimate = gaussian.rhs_estimate;
        invariance.pathwise = true;
        invariance.n_samples = s.n_mark_paths;
        invariance.z_score = std::abs(uniform.rhs_estimate - gaussian.rhs_estimate);
        invariance.threshold = 0.0;
        invariance.pass = invariance.z_score == 0.0;
        invariance.note = "Gamma[F] identical under both mark laws";
        return std::vector{uniform, gaussian, invariance};
    });
    c.emplace_back("gamma-closed-form", [](const Settings& s) {
        return std::vector{check_gamma_closed_form(make_phi(s), make_measure(s), s.horizon, s.n_pathwise, context(s))};
    });
    c.emplace_back("fd-oracle", [](const Settings& s) {
        const auto spec = make_measure(s);
        const std::size_t n = std::min<std::size_t>(20, s.n_pathwise);
        const auto named = [](EstimateReport r, const std::string& family) {
            r.name += "-" + family;
            return r;
        };
        return std::vector{
            named(check_fd_oracle(linear_functional(fn::sigmoid(3.0), *spec, s.horizon), spec, s.horizon, n,
                                  context(s)),
                  "linear"),
            named(check_fd_oracle(exponential_functional(fn::sigmoid(3.0), *spec, s.horizon), spec, s.horizon, n,
                                  context(s)),
                  "exponential"),
            named(check_fd_oracle(stochastic_integral_functional(make_phi(s), *spec, s.horizon), spec, s.horizon, n,
                                  context(s)),
                  "stochastic-integral")};
    });
    return c;
}

std::string format_complex(std::complex<double> z) {
    std::ostringstream os;
    os << std::setprecision(6) << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

void print_table(std::ostream& out, const std::vector<EstimateReport>& reports) {
    out << std::left << std::setw(32) << "check" << std::setw(26) << "lhs" << std::setw(26) << "rhs"
        << std::setw(13) << "stderr" << std::setw(12) << "n" << std::setw(13) << "z / rel" << std::setw(10)
        << "limit"
        << "verdict\n";
    for (const EstimateReport& r : reports) {
        std::ostringstream se;
        std::ostringstream z;
        std::ostringstream lim;
        se << std::setprecision(4) << r.std_error;
        z << std::setprecision(4) << r.z_score;
        lim << std::setprecision(3) << r.threshold;
        out << std::left << std::setw(32) << r.name << std::setw(26) << format_complex(r.lhs_estimate)
            << std::setw(26) << format_complex(r.rhs_estimate) << std::setw(13) << (r.pathwise ? "-" : se.str())
            << std::setw(12) << r.n_samples << std::setw(13) << z.str() << std::setw(10) << lim.str()
            << (r.pass ? "PASS" : "FAIL") << "\n";
    }
}

}  // namespace

void apply_config(Settings& settings, std::istream& in) {
    CLI::ConfigINI parser;
    std::vector<CLI::ConfigItem> items;
    try {
        items = parser.from_config(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const CLI::ConfigItem& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (item.parents.size() != 1) {
            throw ConfigError("config key '" + item.fullname() + "' must be inside a section");
        }
        std::string value;
        for (std::size_t i = 0; i < item.inputs.size(); ++i) {
            if (i) value += ",";
            value += item.inputs[i];
        }
        assign(settings, item.parents.front() + "." + item.name, trim(value));
    }
}

void apply_config_file(Settings& settings, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    apply_config(settings, in);
}

void apply_overrides(Settings& s, const Overrides& o) {
    if (o.seed) s.seed = *o.seed;
    if (o.paths) s.n_paths = *o.paths;
    if (o.horizon) s.horizon = *o.horizon;
    if (o.measure) s.measure = *o.measure;
    if (o.phi) set_phi(s, *o.phi);
    if (o.checks) s.checks = split_list(*o.checks);
    if (o.jobs) s.jobs = *o.jobs;
    if (o.output) s.output_dir = *o.output;
    if (o.bins) s.bins = *o.bins;
}

Settings resolve_settings(const std::optional<std::filesystem::path>& config, const Overrides& overrides) {
    Settings s;
    if (config) apply_config_file(s, *config);
    apply_overrides(s, overrides);
    return s;
}

std::shared_ptr<const JumpMeasureSpec> make_measure(const Settings& s) {
    try {
        if (s.measure == "symmetric-stable" || s.measure == "stable") {
            return std::make_shared<const JumpMeasureSpec>(
                symmetric_stable_measure(s.alpha, s.trunc_a, s.trunc_b, s.intensity));
        }
        if (s.measure == "uniform") {
            return std::make_shared<const JumpMeasureSpec>(uniform_measure(s.trunc_a, s.trunc_b, s.intensity));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown measure '" + s.measure + "' (expected symmetric-stable or uniform)");
}

ScalarTestFunction make_phi(const Settings& s) {
    if (!s.phi_coeffs.empty()) return fn::polynomial(s.phi_coeffs);
    try {
        return fn::builtin(s.phi_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RealFunctional make_functional(const Settings& s, const JumpMeasureSpec& spec) {
    if (s.family == "stochastic-integral") return stochastic_integral_functional(make_phi(s), spec, s.horizon);
    if (s.family == "linear") return linear_functional(make_phi(s), spec, s.horizon);
    throw ConfigError("unknown functional family '" + s.family + "' (expected stochastic-integral or linear)");
}

std::vector<std::string> check_names() {
    std::vector<std::string> names;
    for (const auto& [name, runner] : catalogue()) names.push_back(name);
    return names;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    std::string text(buf, res.ptr);
    if (std::isfinite(v) && text.find_first_of(".e") == std::string::npos) text += ".0";
    return text;
}

int cmd_verify(const Settings& s, std::ostream& out, std::ostream& err) {
    try {
        const auto all = catalogue();
        std::vector<std::pair<std::string, CheckRunner>> selected;
        if (s.checks.empty() || (s.checks.size() == 1 && s.checks.front() == "all")) {
            selected = all;
        } else {
            for (const std::string& name : s.checks) {
                const auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.first == name; });
                if (it == all.end()) throw ConfigError("unknown check '" + name + "'");
                selected.push_back(*it);
            }
        }
        if (s.n_paths == 0 || s.n_marks == 0 || s.n_mark_paths == 0 || s.n_pathwise == 0) {
            throw ConfigError("sample sizes must be positive");
        }
        make_measure(s);
        make_phi(s);

        std::vector<EstimateReport> reports;
        for (const auto& [name, runner] : selected) {
            for (EstimateReport& r : runner(s)) reports.push_back(std::move(r));
        }
        print_table(out, reports);
        if (wants(s, "json")) {
            prepare_output_dir(s);
            std::ofstream json = open_output(s.output_dir / "verify.jsonl");
            for (const EstimateReport& r : reports) json << r.to_json().dump() << "\n";
        }
        const bool ok = std::all_of(reports.begin(), reports.end(), [](const EstimateReport& r) { return r.pass; });
        out << (ok ? "all checks passed" : "some checks FAILED") << "\n";
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
    try {
        const auto spec = make_measure(s);
        const RealFunctional F = make_functional(s, *spec);
        prepare_output_dir(s);
        std::ofstream paths = open_output(s.output_dir / "paths.csv");
        std::ofstream functionals = open_output(s.output_dir / "functionals.csv");
        paths << "path_id,time,size,mark\n";
        functionals << "path_id,V,Gamma_V,sharp_sample\n";

        struct Row {
            Configuration config;
            MarkSet marks;
            double v;
            double gamma;
            double sharp;
        };
        const auto rows = parallel_map<std::optional<Row>>(s.n_paths, s.jobs, [&](std::size_t k) {
            Configuration c = path_configuration(spec, s.horizon, s.seed, k);
            RandomStream stream(s.seed, k, substream::marks);
            MarkSet marks = attach_marks(c, stream);
            const double v = F(c);
            const double gamma = gamma_up(F, c);
            const double sharp = sharp_realization(F, c, marks, MarkLaw::uniform_eta);
            return std::optional<Row>(Row{std::move(c), std::move(marks), v, gamma, sharp});
        });
        std::size_t atoms = 0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const Row& r = *rows[k];
            for (std::size_t i = 0; i < r.config.size(); ++i) {
                paths << k << ',' << format_double(r.config[i].time) << ',' << format_double(r.config[i].size) << ','
                      << format_double(r.marks[i]) << '\n';
            }
            atoms += r.config.size();
            functionals << k << ',' << format_double(r.v) << ',' << format_double(r.gamma) << ','
                        << format_double(r.sharp) << '\n';
        }
        if (!paths || !functionals) throw ConfigError("write failed in " + s.output_dir.string());
        out << "simulated " << s.n_paths << " paths with " << atoms << " atoms into " << s.output_dir.string()
            << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_density(const Settings& s, std::ostream& out, std::ostream& err) {
    try {
        if (s.bins == 0) throw ConfigError("bins must be positive");
        const auto spec = make_measure(s);
        const DensityReport report = density_report(make_phi(s), spec, s.horizon, s.n_paths, context(s), s.bins);
        prepare_output_dir(s);
        std::ofstream samples = open_output(s.output_dir / "density.csv");
        samples << "path_id,V,Gamma,has_jump\n";
        for (const DensitySample& d : report.samples) {
            samples << d.path << ',' << format_double(d.v) << ',' << format_double(d.gamma) << ','
                    << (d.has_jump ? 1 : 0) << '\n';
        }
        std::ofstream hist = open_output(s.output_dir / "histogram.csv");
        hist << "bin_lo,bin_hi,count\n";
        for (std::size_t b = 0; b < report.bin_counts.size(); ++b) {
            hist << format_double(report.bin_edges[b]) << ',' << format_double(report.bin_edges[b + 1]) << ','
                 << report.bin_counts[b] << '\n';
        }
        if (!samples || !hist) throw ConfigError("write failed in " + s.output_dir.string());
        out << "paths with at least one jump: " << report.jumpy_paths << "\n"
            << "positivity fraction of Gamma[V]: " << format_double(report.positivity_fraction) << "\n"
            << "duplicate V values among jumpy paths: " << report.duplicate_count << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace lp::cli
