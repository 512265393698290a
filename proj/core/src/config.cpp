#include "rydopt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rydopt/csv.hpp"

namespace rydopt {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + s + "' for " + key);
    }
}

std::int64_t to_int(const std::string& s, const std::string& key) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("config: bad integer value '" + s + "' for " + key);
    return v;
}

std::vector<double> to_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : csv::split(s))
        if (!trim(tok).empty()) out.push_back(to_double(trim(tok), key));
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += csv::format(v[i]);
    }
    return out;
}

} // namespace

SystemParams ExperimentConfig::system_params() const {
    SystemParams p;
    p.omega0 = units::wavenumber_to_au(omega0_cm1);
    p.mu = units::debye_to_au(mu_debye);
    p.vdd = units::wavenumber_to_au(vdd_cm1);
    p.validate();
    return p;
}

double ExperimentConfig::tau_au() const { return units::femtosecond_to_au(tau_fs); }

TimeGrid ExperimentConfig::grid() const {
    return TimeGrid::centered(tau_au(), span_tau, n_steps);
}

NoiseSpec ExperimentConfig::noise_spec() const {
    NoiseSpec s;
    s.kind = parse_noise_kind(noise_kind);
    s.channel = parse_channel(noise_channel);
    s.epsilon = epsilon;
    s.beta = beta;
    s.tau_c = units::femtosecond_to_au(tau_c_fs);
    s.seed = master_seed;
    if (pink_generator == "voss") s.pink_generator = PinkGenerator::voss;
    else if (pink_generator == "spectral") s.pink_generator = PinkGenerator::spectral;
    else throw ConfigError("config: pink_generator must be spectral or voss");
    s.validate();
    return s;
}

SweepConfig ExperimentConfig::sweep_config() const {
    SweepConfig c;
    for (double t : sweep_taus_fs) c.taus.push_back(units::femtosecond_to_au(t));
    c.noise = noise_spec();
    c.alphas = sweep_alphas;
    c.n_realizations = n_realizations;
    c.model = parse_model(model);
    c.pulse_source = pulse_source == "from_file"
                         ? SweepConfig::PulseSource::from_file
                         : SweepConfig::PulseSource::gaussian;
    if (pulse_source != "gaussian" && pulse_source != "from_file")
        throw ConfigError("config: pulse_source must be gaussian or from_file");
    c.pulse_file = pulse_file;
    c.span_tau = span_tau;
    c.n_steps = n_steps;
    c.prop = propagation_options();
    c.threads = threads;
    c.validate();
    return c;
}

DmorphConfig ExperimentConfig::dmorph_config() const {
    DmorphConfig c;
    c.ds_init = ds_init;
    c.ds_shrink = ds_shrink;
    c.max_iters = max_iters;
    c.target_fidelity = target_fidelity;
    if (envelope_shape == "sin2") c.envelope_shape = EnvelopeShape::sin2_window;
    else if (envelope_shape == "gaussian") c.envelope_shape = EnvelopeShape::gaussian_window;
    else throw ConfigError("config: envelope_shape must be sin2 or gaussian");
    c.gram_regularization = gram_regularization;
    c.grow_factor = grow_factor;
    c.grow_after = grow_after;
    c.substeps = substeps;
    c.validate();
    return c;
}

PropagationOptions ExperimentConfig::propagation_options() const {
    PropagationOptions o;
    o.stepper = parse_stepper(stepper);
    o.substeps = substeps;
    return o;
}

void ExperimentConfig::validate() const {
    system_params();
    grid().validate();
    noise_spec();
    dmorph_config();
    propagation_options();
    if (!(tau_fs > 0.0)) throw ConfigError("config: tau_fs must be positive");
    if (!(span_tau > 0.0)) throw ConfigError("config: span_tau must be positive");
    if (n_realizations < 2) throw ConfigError("config: n_realizations must be >= 2");
}

void set_config_value(ExperimentConfig& cfg, const std::string& section,
                      const std::string& key, const std::string& value) {
    const std::string where = section.empty() ? key : section + "." + key;
    if (section.empty()) {
        if (key == "master_seed") { cfg.master_seed = static_cast<std::uint64_t>(to_int(value, where)); return; }
        if (key == "output_dir") { cfg.output_dir = value; return; }
        if (key == "threads") { cfg.threads = static_cast<int>(to_int(value, where)); return; }
    } else if (section == "system") {
        if (key == "omega0_cm1") { cfg.omega0_cm1 = to_double(value, where); return; }
        if (key == "mu_debye") { cfg.mu_debye = to_double(value, where); return; }
        if (key == "vdd_cm1") { cfg.vdd_cm1 = to_double(value, where); return; }
    } else if (section == "grid") {
        if (key == "tau_fs") { cfg.tau_fs = to_double(value, where); return; }
        if (key == "n_steps") { cfg.n_steps = to_int(value, where); return; }
        if (key == "span_tau") { cfg.span_tau = to_double(value, where); return; }
    } else if (section == "noise") {
        if (key == "kind") { cfg.noise_kind = value; return; }
        if (key == "channel") { cfg.noise_channel = value; return; }
        if (key == "epsilon") { cfg.epsilon = to_double(value, where); return; }
        if (key == "beta") { cfg.beta = to_double(value, where); return; }
        if (key == "tau_c_fs") { cfg.tau_c_fs = to_double(value, where); return; }
        if (key == "pink_generator") { cfg.pink_generator = value; return; }
    } else if (section == "sweep") {
        if (key == "taus_fs") { cfg.sweep_taus_fs = to_list(value, where); return; }
        if (key == "alphas") { cfg.sweep_alphas = to_list(value, where); return; }
        if (key == "n_realizations") { cfg.n_realizations = static_cast<int>(to_int(value, where)); return; }
        if (key == "model") { cfg.model = value; return; }
        if (key == "pulse_source") { cfg.pulse_source = value; return; }
        if (key == "pulse_file") { cfg.pulse_file = value; return; }
    } else if (section == "dmorph") {
        if (key == "ds_init") { cfg.ds_init = to_double(value, where); return; }
        if (key == "ds_shrink") { cfg.ds_shrink = to_double(value, where); return; }
        if (key == "max_iters") { cfg.max_iters = static_cast<int>(to_int(value, where)); return; }
        if (key == "target_fidelity") { cfg.target_fidelity = to_double(value, where); return; }
        if (key == "envelope_shape") { cfg.envelope_shape = value; return; }
        if (key == "gram_regularization") { cfg.gram_regularization = to_double(value, where); return; }
        if (key == "grow_factor") { cfg.grow_factor = to_double(value, where); return; }
        if (key == "grow_after") { cfg.grow_after = static_cast<int>(to_int(value, where)); return; }
    } else if (section == "propagate") {
        if (key == "stepper") { cfg.stepper = value; return; }
        if (key == "substeps") { cfg.substeps = static_cast<int>(to_int(value, where)); return; }
    } else {
        throw ConfigError("config: unknown section [" + section + "]");
    }
    throw ConfigError("config: unknown key '" + where + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: bad section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " +
                              std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        set_config_value(cfg, section, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "master_seed = " << cfg.master_seed << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "threads = " << cfg.threads << "\n\n";
    out << "[system]\n";
    out << "omega0_cm1 = " << csv::format(cfg.omega0_cm1) << "\n";
    out << "mu_debye = " << csv::format(cfg.mu_debye) << "\n";
    out << "vdd_cm1 = " << csv::format(cfg.vdd_cm1) << "\n\n";
    out << "[grid]\n";
    out << "tau_fs = " << csv::format(cfg.tau_fs) << "\n";
    out << "n_steps = " << cfg.n_steps << "\n";
    out << "span_tau = " << csv::format(cfg.span_tau) << "\n\n";
    out << "[noise]\n";
    out << "kind = " << cfg.noise_kind << "\n";
    out << "channel = " << cfg.noise_channel << "\n";
    out << "epsilon = " << csv::format(cfg.epsilon) << "\n";
    out << "beta = " << csv::format(cfg.beta) << "\n";
    out << "tau_c_fs = " << csv::format(cfg.tau_c_fs) << "\n";
    out << "pink_generator = " << cfg.pink_generator << "\n\n";
    out << "[sweep]\n";
    out << "taus_fs = " << join(cfg.sweep_taus_fs) << "\n";
    out << "alphas = " << join(cfg.sweep_alphas) << "\n";
    out << "n_realizations = " << cfg.n_realizations << "\n";
    out << "model = " << cfg.model << "\n";
    out << "pulse_source = " << cfg.pulse_source << "\n";
    if (!cfg.pulse_file.empty()) out << "pulse_file = " << cfg.pulse_file << "\n";
    out << "\n[dmorph]\n";
    out << "ds_init = " << csv::format(cfg.ds_init) << "\n";
    out << "ds_shrink = " << csv::format(cfg.ds_shrink) << "\n";
    out << "max_iters = " << cfg.max_iters << "\n";
    out << "target_fidelity = " << csv::format(cfg.target_fidelity) << "\n";
    out << "envelope_shape = " << cfg.envelope_shape << "\n";
    out << "gram_regularization = " << csv::format(cfg.gram_regularization) << "\n";
    out << "grow_factor = " << csv::format(cfg.grow_factor) << "\n";
    out << "grow_after = " << cfg.grow_after << "\n\n";
    out << "[propagate]\n";
    out << "stepper = " << cfg.stepper << "\n";
    out << "substeps = " << cfg.substeps << "\n";
    return out.str();
}

} // namespace rydopt
