// cli.hpp: experiment configuration, output serialization and the symstruct subcommands

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "symstruct/reference_models.hpp"
#include "symstruct/validators.hpp"

namespace symstruct::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitConfig = 2,
    kExitPhysics = 3,
    kExitNumerical = 4,
};

// Invalid configuration; what() carries "<source>:<line>: <message>".
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { JC, SpinStar, Custom };

// Series kinds accepted by the CLI; Exact uses the joint-unitary map and finite-difference generator.
enum class ApproxKind { Maclaurin, Chebychev, Exact };

struct SeriesEntry {
    ApproxKind kind{ApproxKind::Chebychev};
    int order{0};  // 0 selects default_order
    std::string label() const;
};

struct Tolerances {
    double postulate{1e-10};
    double cptp{1e-10};
    double trace_norm{1e-10};
    double asymmetry{1e-8};
    double damping{1e-8};
    double block{1e-9};
};

struct CustomModel {
    Matrix h_s, h_e, h_se, rho_e;
};

struct ExperimentConfig {
    std::string source{"<config>"};
    std::string text;
    std::string hash;  // SHA-256 of the config bytes
    nlohmann::json json;

    ModelKind model{ModelKind::JC};
    JCConfig jc;
    int spin_k{1};
    std::vector<double> spin_g{1.0};
    double spin_omega{1.0};
    double r_z{0.3};
    cplx r_plus{0.1, 0.0};
    CustomModel custom;

    bool grid_scaled{false};  // t_max given as g t
    double t_max{1.0};
    int n_points{2};

    std::vector<SeriesEntry> series;
    GeneratorForm form{GeneratorForm::TimeLocal};
    std::string out_dir{"."};
    Tolerances tol;
    std::vector<std::string> inputs;

    TimeGrid grid(double g = 1.0) const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string format_double(double v);  // %.17g, "nan", "inf", "-inf"
// JSON text with fixed key order and %.17g numbers.
std::string dump_json(const nlohmann::json& j, int indent = 2);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

struct CommandResult {
    int exit_code{kExitOk};
    std::vector<std::string> files;
    std::vector<std::string> messages;
};

CommandResult cmd_jc_rates(const ExperimentConfig& cfg, const std::string& out_dir);
CommandResult cmd_spinstar_compare(const ExperimentConfig& cfg, const std::string& out_dir, int threads = 1);
CommandResult cmd_extract(const ExperimentConfig& cfg, const std::string& out_dir, int threads = 1);
CommandResult cmd_validate(const ExperimentConfig& cfg, const std::string& out_dir);

// Full command-line entry point.
int run(int argc, char** argv);

} // namespace symstruct::cli
