// stno: phase-encoded logic on spin torque nano oscillators.
//
// Subcommands: gate | mux | circuit | film | sweep.  Each takes an optional
// JSON config (--config); command-line flags and --set key=value pairs
// override config values.  Outputs are CSV files in --out plus a one-line
// result on stdout.  Exit codes: 0 success, 1 runtime/physics error,
// 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "stno/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw stno::PreconditionError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw stno::PreconditionError("cannot write file: " + path.string());
    out << content;
}

// Base config from --config merged with --set overrides and flag values.
json merged_config(const std::string& config_path, const std::vector<std::string>& sets) {
    json j = json::object();
    if (!config_path.empty()) {
        j = json::parse(read_file(config_path), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw stno::PreconditionError("config file is not a JSON object: " + config_path);
    }
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw stno::PreconditionError("--set expects key=value, got: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        const json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded())
            j[key] = value;  // bare string
        else
            j[key] = parsed;
    }
    return j;
}

int thread_cap() {
    if (const char* env = std::getenv("STNO_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--set", sets, "override a config key (key=value, value parsed as JSON)");
    }
};

int run_gate(const CommonOpts& opts, json j) {
    const auto ex = stno::gate_experiment_from_json(j.dump());
    const auto res = stno::run_gate_experiment(ex);

    std::ostringstream csv;
    stno::export_gate_csv(res.traj, res.carrier, csv);
    write_file(fs::path(opts.out_dir) / "gate_trajectory.csv", csv.str());

    if (!res.digit) {
        std::cerr << "indeterminate readout (integral " << res.correlation.integral << ")\n";
        return 1;
    }
    std::cout << stno::to_int(*res.digit) << "\n";
    return 0;
}

int run_mux(const CommonOpts& opts, json j) {
    const auto ex = stno::mux_experiment_from_json(j.dump());
    const auto res = stno::run_mux_experiment(ex);

    for (int ch = 0; ch < 2; ++ch) {
        const stno::CarrierSpec& carrier = ch == 0 ? res.carrier1 : res.carrier2;
        std::ostringstream csv;
        stno::export_gate_csv(res.traj, carrier, csv);
        write_file(fs::path(opts.out_dir) / ("mux_channel" + std::to_string(ch + 1) + ".csv"),
                   csv.str());
    }
    std::cout << stno::gate_name(ex.gate1) << ":" << stno::to_int(res.digit1) << " "
              << stno::gate_name(ex.gate2) << ":" << stno::to_int(res.digit2) << "\n";
    return 0;
}

int run_circuit(const CommonOpts& opts, json j) {
    const auto ex = stno::circuit_experiment_from_json(j.dump());
    const auto res = stno::run_circuit_experiment(ex);
    if (!res.netlist_text.empty()) {
        const fs::path path = fs::path(opts.out_dir) / "netlist.txt";
        write_file(path, res.netlist_text);
        std::cout << "netlist: " << path.string() << "\n";
    }
    std::cout << stno::to_int(res.digit) << "\n";
    return 0;
}

int run_film(const CommonOpts& opts, const std::string& layout_path, json j) {
    if (!layout_path.empty()) {
        const auto contacts = stno::layout_from_json(read_file(layout_path));
        j["contacts"] = json::parse(stno::layout_to_json(contacts));
    }
    const auto ex = stno::film_experiment_from_json(j.dump());
    const auto res = stno::run_film_experiment(ex);

    for (const auto& probe : res.run.probes) {
        std::ostringstream csv;
        stno::export_probe_csv(probe, csv);
        write_file(fs::path(opts.out_dir) / ("probe_site" + std::to_string(probe.contact_id) +
                                             ".csv"),
                   csv.str());
    }
    for (std::size_t k = 0; k < res.run.snapshots.size(); ++k) {
        std::ostringstream pgm;
        stno::export_magnitude_pgm(res.run.snapshots[k].second, pgm);
        write_file(fs::path(opts.out_dir) / ("snapshot_" + std::to_string(k) + ".pgm"),
                   pgm.str());
    }
    std::ostringstream summary;
    stno::export_film_summary_csv(res.summary, summary);
    write_file(fs::path(opts.out_dir) / "film_summary.csv", summary.str());
    write_file(fs::path(opts.out_dir) / "layout.json", stno::layout_to_json(res.contacts));

    std::cout << summary.str();
    return 0;
}

int run_sweep_cmd(const CommonOpts& opts) {
    if (opts.config_path.empty())
        throw stno::PreconditionError("sweep requires --config");
    const auto cfg = stno::sweep_config_from_json(read_file(opts.config_path));
    const std::string csv = stno::run_sweep(cfg, thread_cap());
    const fs::path path = fs::path(opts.out_dir) / "sweep.csv";
    write_file(path, csv);
    std::cout << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-encoded logic machine on spin torque nano oscillators"};
    app.require_subcommand(1);

    CommonOpts gate_opts, mux_opts, circuit_opts, film_opts, sweep_opts;

    auto* gate_cmd = app.add_subcommand("gate", "run one logic gate on a single oscillator");
    std::string gate_name_arg;
    int gate_a = -1, gate_b = -1;
    gate_cmd->add_option("--gate", gate_name_arg, "OR, AND, or NAND");
    gate_cmd->add_option("-a", gate_a, "input digit a (0/1)");
    gate_cmd->add_option("-b", gate_b, "input digit b (0/1)");
    gate_opts.attach(gate_cmd);

    auto* mux_cmd = app.add_subcommand("mux", "frequency-multiplexed two-gate run");
    int mux_a = -1, mux_b = -1;
    mux_cmd->add_option("-a", mux_a, "input digit a (0/1)");
    mux_cmd->add_option("-b", mux_b, "input digit b (0/1)");
    mux_opts.attach(mux_cmd);

    auto* circuit_cmd = app.add_subcommand("circuit", "compile and simulate a boolean circuit");
    std::string expr;
    std::vector<std::string> bindings;
    std::string mode;
    bool xor_stencil = false;
    circuit_cmd->add_option("--expr", expr, "boolean expression (& | ^ ~ !&)");
    circuit_cmd->add_option("--input", bindings, "input binding name=digit (repeatable)");
    circuit_cmd->add_option("--mode", mode, "staged or coupled");
    circuit_cmd->add_flag("--xor-stencil", xor_stencil, "use the 3-node XOR stencil");
    circuit_opts.attach(circuit_cmd);

    auto* film_cmd = app.add_subcommand("film", "spin-wave communication on a 2D film");
    std::string layout_path;
    film_cmd->add_option("--layout", layout_path, "contact layout JSON file");
    film_opts.attach(film_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "deterministic parameter sweep");
    sweep_opts.attach(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gate_cmd->parsed()) {
            json j = merged_config(gate_opts.config_path, gate_opts.sets);
            if (!gate_name_arg.empty()) j["gate"] = gate_name_arg;
            if (gate_a >= 0) j["a"] = gate_a;
            if (gate_b >= 0) j["b"] = gate_b;
            return run_gate(gate_opts, std::move(j));
        }
        if (mux_cmd->parsed()) {
            json j = merged_config(mux_opts.config_path, mux_opts.sets);
            if (mux_a >= 0) j["a"] = mux_a;
            if (mux_b >= 0) j["b"] = mux_b;
            return run_mux(mux_opts, std::move(j));
        }
        if (circuit_cmd->parsed()) {
            json j = merged_config(circuit_opts.config_path, circuit_opts.sets);
            if (!expr.empty()) j["expr"] = expr;
            if (xor_stencil) j["xor_stencil"] = true;
            if (!mode.empty()) j["mode"] = mode;
            if (!bindings.empty()) {
                json inputs = j.value("inputs", json::object());
                for (const auto& kv : bindings) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw stno::PreconditionError("--input expects name=digit, got: " + kv);
                    inputs[kv.substr(0, eq)] = std::stoi(kv.substr(eq + 1));
                }
                j["inputs"] = inputs;
            }
            return run_circuit(circuit_opts, std::move(j));
        }
        if (film_cmd->parsed()) {
            json j = merged_config(film_opts.config_path, film_opts.sets);
            return run_film(film_opts, layout_path, std::move(j));
        }
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
