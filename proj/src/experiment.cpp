#include "stno/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

namespace stno {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw PreconditionError(std::string("invalid JSON config: ") + e.what());
    }
}

void check_keys(const json& j, const std::vector<std::string>& allowed) {
    if (!j.is_object()) throw PreconditionError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw PreconditionError("unknown config key: " + key);
    }
}

GateKind gate_from_name(const std::string& name) {
    if (name == "OR" || name == "or") return GateKind::Or;
    if (name == "AND" || name == "and") return GateKind::And;
    if (name == "NAND" || name == "nand") return GateKind::Nand;
    throw PreconditionError("unknown gate name: " + name);
}

const json& require_key(const json& j, const std::string& key, const std::string& what) {
    if (!j.is_object() || !j.contains(key))
        throw PreconditionError(what + " needs key: " + key);
    return j.at(key);
}

Digit digit_field(const json& j, const std::string& key, Digit fallback) {
    if (!j.contains(key)) return fallback;
    return digit_from_int(j.at(key).get<int>());
}

template <typename T>
void opt(const json& j, const std::string& key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_params(const json& j, StnoParams& p) {
    opt(j, "omega", p.omega);
    opt(j, "lambda", p.lambda);
    opt(j, "saturation", p.b);
    if (p.b <= 0.0) throw PreconditionError("saturation must be positive");
}

void apply_carrier(const json& j, CarrierSpec& c) {
    opt(j, "carrier_frequency", c.frequency);
    opt(j, "carrier_amplitude", c.amplitude);
    opt(j, "carrier_phase", c.phase);
    if (c.frequency <= 0.0 || c.amplitude <= 0.0)
        throw PreconditionError("carrier amplitude and frequency must be positive");
}

const std::vector<std::string> kCommonKeys = {
    "omega", "lambda", "saturation", "gain", "dt", "stride", "n_periods",
    "carrier_frequency", "carrier_amplitude", "carrier_phase"};

std::vector<std::string> with_common(std::vector<std::string> extra) {
    extra.insert(extra.end(), kCommonKeys.begin(), kCommonKeys.end());
    return extra;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runners

GateResult run_gate_experiment(const GateExperiment& ex) {
    GateResult res;
    res.carrier = ex.carrier;
    res.traj = run_logic_gate(ex.gate, ex.a, ex.b, ex.params, ex.carrier, ex.gain, ex.n_periods,
                              ex.dt, ex.stride);
    const double r_ref = reference_amplitude(ex.params, ex.gain);
    res.correlation = correlate_gate_run(res.traj, ex.carrier, r_ref);
    res.digit = res.correlation.digit;
    return res;
}

MuxResult run_mux_experiment(const MuxExperiment& ex) {
    MuxResult res;
    res.carrier1 = {ex.amplitude, ex.frequency1, 0.0};
    res.carrier2 = {ex.amplitude, ex.frequency1 * ex.ratio, 0.0};
    const ForcingTerm forcing = multiplex_forcing(
        {{res.carrier1, ex.gate1, ex.a, ex.b}, {res.carrier2, ex.gate2, ex.a, ex.b}}, ex.gain);

    StnoNetwork net;
    net.params = ex.params;
    net.forcings.push_back(forcing);
    net.readout_carrier = res.carrier1;
    net.r_ref = reference_amplitude(ex.params, forcing.bound());
    net.amplitude_floor = kAmplitudeFloor;

    const double slow_period = std::max(res.carrier1.period(), res.carrier2.period());
    StnoNetworkState s0 = StnoNetworkState::initial(1, 2.0 * slow_period);
    res.traj = integrate(s0, net, ex.n_periods * slow_period, ex.dt, ex.stride);

    const auto digits = decode_multiplex(res.traj, {res.carrier1, res.carrier2}, net.r_ref);
    res.digit1 = digits[0];
    res.digit2 = digits[1];
    return res;
}

CircuitResult run_circuit_experiment(const CircuitExperiment& ex) {
    CircuitResult res;
    if (ex.xor_stencil) {
        res.config = compile_xor_stencil(ex.params, ex.carrier, ex.gain, ex.tau);
        res.config.dt = ex.dt;
    } else {
        const ExprPtr expr = parse_expr(ex.expr);
        const NandDag dag = to_nand(*expr);
        res.netlist_text = netlist(dag);
        res.config = compile(dag, ex.params, ex.carrier, ex.gain, ex.tau);
        res.config.dt = ex.dt;
    }

    std::vector<Digit> bound;
    bound.reserve(res.config.input_names.size());
    for (const auto& name : res.config.input_names) {
        const auto it = ex.inputs.find(name);
        if (it == ex.inputs.end()) throw UnboundVariableError(name);
        bound.push_back(it->second);
    }

    if (ex.coupled) {
        double t_end = ex.t_end;
        if (t_end <= 0.0)
            t_end = static_cast<double>(res.config.schedule.size()) * 4.0 * ex.carrier.period();
        res.digit = evaluate_coupled(res.config, bound, t_end);
    } else {
        res.digit = evaluate_staged(res.config, bound);
    }
    return res;
}

FilmResult run_film_experiment(const FilmExperiment& ex) {
    FilmResult res;
    res.carrier = ex.carrier;
    res.contacts = ex.contacts.empty() ? reference_layout(ex.lx, ex.ly, ex.sponge_width) : ex.contacts;

    FilmGrid grid(ex.nx, ex.ny, ex.lx, ex.ly, ex.sponge_width, ex.sponge_depth);
    FilmParams params = ex.params;
    if (params.amplitude_floor == 0.0) params.amplitude_floor = kAmplitudeFloor;
    FilmSolver solver(grid, params, res.contacts, ex.carrier, ex.gain, ex.dt,
                      ex.detector_bias);
    res.run = simulate_film(solver, ex.n_periods * ex.carrier.period(), ex.probe_stride,
                            ex.snapshot_stride);

    // Summary: digit, nearest forced contact, and burst phase/delay per site.
    std::map<int, std::vector<BurstEvent>> events;
    std::map<int, double> peaks;
    for (std::size_t c = 0; c < res.contacts.size(); ++c) {
        const auto& probe = res.run.probes[c];
        const double t0 = probe.times.front();
        const double t_cut = t0 + (probe.times.back() - t0) / 3.0;
        std::vector<double> times, abs_u;
        double peak = 0.0;
        for (std::size_t i = 0; i < probe.times.size(); ++i) {
            if (probe.times[i] < t_cut) continue;
            times.push_back(probe.times[i]);
            abs_u.push_back(std::abs(probe.mean_u[i]));
            peak = std::max(peak, abs_u.back());
        }
        events[probe.contact_id] = burst_events(times, abs_u, ex.carrier);
        peaks[probe.contact_id] = peak;
    }

    for (std::size_t c = 0; c < res.contacts.size(); ++c) {
        const Contact& contact = res.contacts[c];
        FilmSummaryRow row;
        row.id = contact.id;
        row.polarity = contact.polarity;
        row.digit = decode_probe(res.run.probes[c], ex.carrier);
        row.peak_abs = peaks[contact.id];
        if (contact.polarity == Polarity::Detector) {
            double best = -1.0;
            const Contact* nearest = nullptr;
            for (const auto& other : res.contacts) {
                if (other.polarity == Polarity::Detector) continue;
                const double d = std::hypot(contact.x - other.x, contact.y - other.y);
                if (!nearest || d < best) {
                    best = d;
                    nearest = &other;
                }
            }
            if (nearest) {
                row.nearest_source = nearest->id;
                const auto& src = events[nearest->id];
                const auto& det = events[contact.id];
                if (!src.empty() && !det.empty() &&
                    std::abs(static_cast<long>(src.size()) - static_cast<long>(det.size())) <= 1) {
                    const auto [dphi, delay] = phase_lock_offset(src, det);
                    row.phase_offset = dphi;
                    row.delay = delay;
                }
            }
        }
        res.summary.push_back(row);
    }
    return res;
}

// ---------------------------------------------------------------------------
// JSON config parsing

GateExperiment gate_experiment_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, with_common({"gate", "a", "b"}));
    GateExperiment ex;
    if (j.contains("gate")) ex.gate = gate_from_name(j.at("gate").get<std::string>());
    ex.a = digit_field(j, "a", ex.a);
    ex.b = digit_field(j, "b", ex.b);
    apply_params(j, ex.params);
    apply_carrier(j, ex.carrier);
    opt(j, "gain", ex.gain);
    opt(j, "dt", ex.dt);
    opt(j, "stride", ex.stride);
    opt(j, "n_periods", ex.n_periods);
    return ex;
}

MuxExperiment mux_experiment_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, with_common({"a", "b", "gate1", "gate2", "frequency1", "ratio", "amplitude"}));
    MuxExperiment ex;
    ex.a = digit_field(j, "a", ex.a);
    ex.b = digit_field(j, "b", ex.b);
    if (j.contains("gate1")) ex.gate1 = gate_from_name(j.at("gate1").get<std::string>());
    if (j.contains("gate2")) ex.gate2 = gate_from_name(j.at("gate2").get<std::string>());
    opt(j, "frequency1", ex.frequency1);
    opt(j, "ratio", ex.ratio);
    opt(j, "amplitude", ex.amplitude);
    apply_params(j, ex.params);
    opt(j, "gain", ex.gain);
    opt(j, "dt", ex.dt);
    opt(j, "stride", ex.stride);
    opt(j, "n_periods", ex.n_periods);
    return ex;
}

CircuitExperiment circuit_experiment_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, with_common({"expr", "inputs", "mode", "xor_stencil", "tau", "t_end"}));
    CircuitExperiment ex;
    opt(j, "expr", ex.expr);
    opt(j, "xor_stencil", ex.xor_stencil);
    if (j.contains("mode")) {
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "coupled")
            ex.coupled = true;
        else if (mode == "staged")
            ex.coupled = false;
        else
            throw PreconditionError("mode must be staged or coupled");
    }
    if (j.contains("inputs")) {
        for (const auto& [name, value] : j.at("inputs").items())
            ex.inputs[name] = digit_from_int(value.get<int>());
    }
    apply_params(j, ex.params);
    apply_carrier(j, ex.carrier);
    opt(j, "gain", ex.gain);
    opt(j, "tau", ex.tau);
    opt(j, "dt", ex.dt);
    opt(j, "t_end", ex.t_end);
    return ex;
}

namespace {

Polarity polarity_from_name(const std::string& name) {
    if (name == "positive") return Polarity::Positive;
    if (name == "negative") return Polarity::Negative;
    if (name == "detector") return Polarity::Detector;
    throw PreconditionError("unknown polarity: " + name);
}

const char* polarity_name(Polarity p) {
    switch (p) {
        case Polarity::Positive: return "positive";
        case Polarity::Negative: return "negative";
        case Polarity::Detector: return "detector";
    }
    return "?";
}

std::vector<Contact> contacts_from_json_array(const json& arr) {
    std::vector<Contact> contacts;
    for (const auto& cj : arr) {
        check_keys(cj, {"id", "x", "y", "radius", "polarity"});
        Contact c;
        c.id = require_key(cj, "id", "contact").get<int>();
        c.x = require_key(cj, "x", "contact").get<double>();
        c.y = require_key(cj, "y", "contact").get<double>();
        c.radius = require_key(cj, "radius", "contact").get<double>();
        c.polarity = polarity_from_name(require_key(cj, "polarity", "contact").get<std::string>());
        if (c.radius <= 0.0) throw PreconditionError("contact radius must be positive");
        contacts.push_back(c);
    }
    return contacts;
}

}  // namespace

FilmExperiment film_experiment_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, with_common({"nx", "ny", "lx", "ly", "sponge_width", "sponge_depth",
                               "dispersion_re", "dispersion_im", "detector_bias", "probe_stride",
                               "snapshot_stride", "contacts"}));
    FilmExperiment ex;
    opt(j, "nx", ex.nx);
    opt(j, "ny", ex.ny);
    opt(j, "lx", ex.lx);
    opt(j, "ly", ex.ly);
    opt(j, "sponge_width", ex.sponge_width);
    opt(j, "sponge_depth", ex.sponge_depth);
    double dre = ex.params.dispersion.real(), dim = ex.params.dispersion.imag();
    opt(j, "dispersion_re", dre);
    opt(j, "dispersion_im", dim);
    ex.params.dispersion = {dre, dim};
    opt(j, "omega", ex.params.omega);
    opt(j, "lambda", ex.params.lambda);
    opt(j, "saturation", ex.params.b);
    apply_carrier(j, ex.carrier);
    opt(j, "gain", ex.gain);
    opt(j, "detector_bias", ex.detector_bias);
    opt(j, "dt", ex.dt);
    opt(j, "n_periods", ex.n_periods);
    opt(j, "probe_stride", ex.probe_stride);
    opt(j, "snapshot_stride", ex.snapshot_stride);
    if (j.contains("contacts")) ex.contacts = contacts_from_json_array(j.at("contacts"));
    return ex;
}

// ---------------------------------------------------------------------------
// Forcing / layout serialization

namespace {

json input_ref_to_json(const InputRef& r) {
    switch (r.kind) {
        case InputRef::Kind::Const: return json{{"const", r.const_value}};
        case InputRef::Kind::Node: return json{{"node", r.node}};
        case InputRef::Kind::NegatedNode: return json{{"negated_node", r.node}};
    }
    throw PreconditionError("corrupt input reference");
}

InputRef input_ref_from_json(const json& j) {
    if (j.contains("const")) return InputRef::constant(j.at("const").get<double>());
    if (j.contains("node")) return InputRef::node_ref(j.at("node").get<int>());
    if (j.contains("negated_node"))
        return InputRef::negated_node(j.at("negated_node").get<int>());
    throw PreconditionError("input reference needs const, node, or negated_node");
}

}  // namespace

std::string forcing_to_json(const ForcingTerm& f) {
    json channels = json::array();
    for (const auto& ch : f.channels()) {
        channels.push_back({{"gate", gate_name(ch.gate)},
                            {"carrier_amplitude", ch.carrier.amplitude},
                            {"carrier_frequency", ch.carrier.frequency},
                            {"carrier_phase", ch.carrier.phase},
                            {"left", input_ref_to_json(ch.left)},
                            {"right", input_ref_to_json(ch.right)}});
    }
    return json{{"gain", f.gain()}, {"channels", channels}}.dump(2);
}

ForcingTerm forcing_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, {"gain", "channels"});
    std::vector<ForcingChannel> channels;
    for (const auto& cj : require_key(j, "channels", "forcing")) {
        check_keys(cj, {"gate", "carrier_amplitude", "carrier_frequency", "carrier_phase",
                        "left", "right"});
        ForcingChannel ch;
        ch.gate = gate_from_name(require_key(cj, "gate", "forcing channel").get<std::string>());
        ch.carrier.amplitude = cj.value("carrier_amplitude", 1.0);
        ch.carrier.frequency = require_key(cj, "carrier_frequency", "forcing channel").get<double>();
        ch.carrier.phase = cj.value("carrier_phase", 0.0);
        ch.left = input_ref_from_json(require_key(cj, "left", "forcing channel"));
        ch.right = input_ref_from_json(require_key(cj, "right", "forcing channel"));
        channels.push_back(ch);
    }
    return ForcingTerm(std::move(channels), require_key(j, "gain", "forcing").get<double>());
}

std::vector<Contact> layout_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    if (!j.is_array()) throw PreconditionError("layout file must be a JSON array of contacts");
    return contacts_from_json_array(j);
}

std::string layout_to_json(const std::vector<Contact>& contacts) {
    json arr = json::array();
    for (const auto& c : contacts)
        arr.push_back({{"id", c.id},
                       {"x", c.x},
                       {"y", c.y},
                       {"radius", c.radius},
                       {"polarity", polarity_name(c.polarity)}});
    return arr.dump(2);
}

// ---------------------------------------------------------------------------
// Export

void export_probe_csv(const ProbeSeries& probe, std::ostream& os) {
    os << "t,re_u,im_u,abs_u\n";
    for (std::size_t i = 0; i < probe.times.size(); ++i) {
        const auto& u = probe.mean_u[i];
        os << probe.times[i] << "," << u.real() << "," << u.imag() << "," << std::abs(u) << "\n";
    }
}

void export_snapshot_csv(const Eigen::ArrayXXcd& field, std::ostream& os) {
    os << "i,j,re_u,im_u\n";
    for (Eigen::Index j = 0; j < field.cols(); ++j)
        for (Eigen::Index i = 0; i < field.rows(); ++i)
            os << i << "," << j << "," << field(i, j).real() << "," << field(i, j).imag() << "\n";
}

void export_magnitude_pgm(const Eigen::ArrayXXd& magnitude, std::ostream& os) {
    const double peak = magnitude.maxCoeff();
    const double scale = peak > 0.0 ? 255.0 / peak : 0.0;
    os << "P2\n" << magnitude.rows() << " " << magnitude.cols() << "\n255\n";
    for (Eigen::Index j = 0; j < magnitude.cols(); ++j) {
        for (Eigen::Index i = 0; i < magnitude.rows(); ++i) {
            os << static_cast<int>(std::lround(magnitude(i, j) * scale));
            os << (i + 1 < magnitude.rows() ? ' ' : '\n');
        }
    }
}

void export_film_summary_csv(const std::vector<FilmSummaryRow>& rows, std::ostream& os) {
    os << "site,polarity,digit,nearest_source,phase_offset,delay,peak_abs\n";
    for (const auto& row : rows) {
        os << row.id << "," << polarity_name(row.polarity) << ",";
        if (row.digit)
            os << to_int(*row.digit);
        else
            os << "indeterminate";
        os << "," << row.nearest_source << "," << row.phase_offset << "," << row.delay << ","
           << row.peak_abs << "\n";
    }
}

void export_gate_csv(const Trajectory& traj, const CarrierSpec& carrier, std::ostream& os) {
    os << "t,re_u,im_u,abs_u,v,abs_u_times_p\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const auto& u = traj.u[i][0];
        const double au = std::abs(u);
        os << t << "," << u.real() << "," << u.imag() << "," << au << "," << traj.v[i][0] << ","
           << au * carrier_value(carrier, t) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Sweep harness

SweepConfig sweep_config_from_json(const std::string& json_text) {
    const json j = parse_json(json_text);
    check_keys(j, {"kind", "base", "sweep"});
    SweepConfig cfg;
    cfg.kind = require_key(j, "kind", "sweep config").get<std::string>();
    if (cfg.kind != "gate" && cfg.kind != "mux" && cfg.kind != "circuit" && cfg.kind != "film")
        throw PreconditionError("sweep kind must be gate, mux, circuit, or film");
    cfg.base_json = j.value("base", json::object()).dump();
    if (!j.contains("sweep") || !j.at("sweep").is_object() || j.at("sweep").empty())
        throw PreconditionError("sweep config needs a non-empty sweep object");
    for (const auto& [key, values] : j.at("sweep").items()) {
        if (!values.is_array() || values.empty())
            throw PreconditionError("sweep axis " + key + " must be a non-empty array");
        std::vector<std::string> vals;
        for (const auto& v : values) vals.push_back(v.dump());
        cfg.axes.emplace_back(key, std::move(vals));
    }
    return cfg;
}

namespace {

// One sweep run: apply the axis values on top of the base config, run the
// experiment, and render the outcome as CSV cells.
std::string run_sweep_point(const std::string& kind, const json& merged) {
    const std::string text = merged.dump();
    std::ostringstream os;
    try {
        if (kind == "gate") {
            const GateResult res = run_gate_experiment(gate_experiment_from_json(text));
            if (res.digit)
                os << to_int(*res.digit);
            else
                os << "indeterminate";
            os << "," << res.correlation.integral;
        } else if (kind == "mux") {
            const MuxResult res = run_mux_experiment(mux_experiment_from_json(text));
            os << to_int(res.digit1) << ";" << to_int(res.digit2) << ",";
        } else if (kind == "circuit") {
            const CircuitResult res = run_circuit_experiment(circuit_experiment_from_json(text));
            os << to_int(res.digit) << ",";
        } else {  // film
            const FilmResult res = run_film_experiment(film_experiment_from_json(text));
            std::string cell;
            for (const auto& row : res.summary) {
                if (row.polarity != Polarity::Detector) continue;
                if (!cell.empty()) cell += ";";
                cell += std::to_string(row.id) + ":" +
                        (row.digit ? std::to_string(to_int(*row.digit)) : "indeterminate");
            }
            os << cell << ",";
        }
    } catch (const std::exception& e) {
        os.str("");
        std::string what = e.what();
        for (auto& ch : what)
            if (ch == ',' || ch == '\n') ch = ' ';
        os << "error," << what;
    }
    return os.str();
}

}  // namespace

std::string run_sweep(const SweepConfig& config, int max_threads) {
    const json base = parse_json(config.base_json);

    std::size_t total = 1;
    for (const auto& [key, values] : config.axes) total *= values.size();
    if (total == 0) throw PreconditionError("empty sweep");

    // Cartesian index -> per-axis value indices, last axis fastest.
    auto point = [&](std::size_t idx) {
        std::vector<std::size_t> sel(config.axes.size());
        for (std::size_t a = config.axes.size(); a-- > 0;) {
            sel[a] = idx % config.axes[a].second.size();
            idx /= config.axes[a].second.size();
        }
        return sel;
    };

    std::vector<std::string> rows(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            const auto sel = point(i);
            json merged = base;
            std::string prefix;
            for (std::size_t a = 0; a < config.axes.size(); ++a) {
                const json value = json::parse(config.axes[a].second[sel[a]]);
                merged[config.axes[a].first] = value;
                prefix += value.dump() + ",";
            }
            rows[i] = prefix + run_sweep_point(config.kind, merged);
        }
    };

    int n_threads = std::max(1, std::min<int>(max_threads, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream os;
    for (const auto& [key, values] : config.axes) os << key << ",";
    os << "result,detail\n";
    for (const auto& row : rows) os << row << "\n";
    return os.str();
}

}  // namespace stno
