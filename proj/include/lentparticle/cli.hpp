#pragma once

// Command implementations behind the `lentparticle` executable.
//
// Settings are resolved as: built-in defaults, then the config file, then
// command-line flags. The config file is INI-style:
//
//   [measure]     name, alpha, trunc_a, trunc_b, intensity
//   [experiment]  T, n_paths, n_marks, n_mark_paths, n_pathwise, n_inner,
//                 seed, z_max, jobs, bins
//   [functional]  family, phi_name | phi_coeffs
//   [output]      dir, formats
//   [verify]      checks
//
// Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lentparticle/bottom_space.hpp"
#include "lentparticle/functionals.hpp"

namespace lp::cli {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    std::string measure = "symmetric-stable";
    double alpha = 1.0;
    double trunc_a = 0.1;
    double trunc_b = 1.0;
    double intensity = 5.0;

    double horizon = 1.0;
    std::size_t n_paths = 100000;
    std::size_t n_marks = 100000;
    std::size_t n_mark_paths = 20;
    std::size_t n_pathwise = 1000;
    std::size_t n_inner = 4;
    std::uint64_t seed = 42;
    double z_max = 4.0;
    unsigned jobs = 0;
    std::size_t bins = 50;

    std::string family = "stochastic-integral";
    std::string phi_name = "identity";
    std::vector<double> phi_coeffs;  // used instead of phi_name when nonempty

    std::filesystem::path output_dir = "lentparticle-out";
    std::vector<std::string> formats = {"csv", "json"};

    std::vector<std::string> checks;  // empty: every check
};

// Flag values; unset fields leave the settings alone.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> horizon;
    std::optional<std::string> measure;
    std::optional<std::string> phi;  // builtin name or comma-separated coefficients
    std::optional<std::string> checks;
    std::optional<unsigned> jobs;
    std::optional<std::string> output;
    std::optional<std::size_t> bins;
};

void apply_config(Settings& settings, std::istream& in);
void apply_config_file(Settings& settings, const std::filesystem::path& path);
void apply_overrides(Settings& settings, const Overrides& overrides);
Settings resolve_settings(const std::optional<std::filesystem::path>& config, const Overrides& overrides);

std::shared_ptr<const JumpMeasureSpec> make_measure(const Settings& settings);
ScalarTestFunction make_phi(const Settings& settings);
RealFunctional make_functional(const Settings& settings, const JumpMeasureSpec& spec);

std::vector<std::string> check_names();

// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double v);

int cmd_verify(const Settings& settings, std::ostream& out, std::ostream& err);
int cmd_simulate(const Settings& settings, std::ostream& out, std::ostream& err);
int cmd_density(const Settings& settings, std::ostream& out, std::ostream& err);

}  // namespace lp::cli
