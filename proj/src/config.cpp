#include "lamdet/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lamdet {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    for (const char ch : value) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!current.empty()) items.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!current.empty()) items.push_back(std::move(current));
    return items;
}

struct LineContext {
    const std::string& origin;
    int line_no;

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + message);
    }
};

double parse_real(const std::string& value, const LineContext& ctx) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return parsed;
    } catch (const std::exception&) {
        ctx.fail("expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& value, const LineContext& ctx) {
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return parsed;
    } catch (const std::exception&) {
        ctx.fail("expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& value, const LineContext& ctx) {
    try {
        std::size_t used = 0;
        const std::uint64_t parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return parsed;
    } catch (const std::exception&) {
        ctx.fail("expected an unsigned integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const LineContext& ctx) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    ctx.fail("expected true/false, got '" + value + "'");
}

std::vector<double> parse_real_list(const std::string& value, const LineContext& ctx) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) out.push_back(parse_real(item, ctx));
    return out;
}

} // namespace

Complex parse_complex(const std::string& token) {
    std::string s = trim(token);
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    const char tail = s.back();
    if (tail != 'i' && tail != 'j') {
        std::size_t used = 0;
        const double re = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad complex literal: " + token);
        return {re, 0.0};
    }
    s.pop_back(); // drop the i/j
    // Split at the last +/- that is not a leading sign or an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const auto parse_part = [&](const std::string& part, double bare) {
        if (part.empty() || part == "+") return bare;
        if (part == "-") return -bare;
        std::size_t used = 0;
        const double parsed = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument("bad complex literal: " + token);
        return parsed;
    };
    if (split == std::string::npos) {
        return {0.0, parse_part(s, 1.0)}; // pure imaginary
    }
    const double re = parse_part(s.substr(0, split), 0.0);
    const double im = parse_part(s.substr(split), 1.0);
    return {re, im};
}

std::string format_complex(Complex value) {
    std::ostringstream os;
    os << format_double(value.real());
    if (value.imag() != 0.0) {
        if (value.imag() > 0.0) os << '+';
        os << format_double(value.imag()) << 'i';
    }
    return os.str();
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig config;
    std::set<std::string> seen;
    bool has_u_bar = false, has_look_deg = false, has_alpha = false;
    bool has_delta_u = false, has_target_deg = false;
    bool has_jammer_u = false, has_jammer_deg = false;
    bool has_scan_u0 = false, has_scan_deg = false;
    double look_deg = 0.0, target_deg = 0.0, scan_deg = 0.0;
    std::vector<double> jammer_deg;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const LineContext ctx{origin, line_no};
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            ctx.fail("expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) ctx.fail("missing key");
        if (value.empty()) ctx.fail("missing value for key '" + key + "'");
        if (!seen.insert(key).second) ctx.fail("duplicate key '" + key + "'");

        if (key == "n_elements") config.n_elements = parse_int(value, ctx);
        else if (key == "spacing_over_wavelength")
            config.spacing_over_wavelength = parse_real(value, ctx);
        else if (key == "u_bar") { config.u_bar = parse_real(value, ctx); has_u_bar = true; }
        else if (key == "look_angle_deg") { look_deg = parse_real(value, ctx); has_look_deg = true; }
        else if (key == "alpha") { config.alpha = parse_real(value, ctx); has_alpha = true; }
        else if (key == "coupling_order") config.coupling_order = parse_int(value, ctx);
        else if (key == "coupling_coeffs") {
            config.coupling_coeffs.clear();
            for (const std::string& item : split_list(value)) {
                try {
                    config.coupling_coeffs.push_back(parse_complex(item));
                } catch (const std::exception&) {
                    ctx.fail("bad complex value '" + item + "'");
                }
            }
        }
        else if (key == "jammer_u") { config.jammer_u = parse_real_list(value, ctx); has_jammer_u = true; }
        else if (key == "jammer_angle_deg") { jammer_deg = parse_real_list(value, ctx); has_jammer_deg = true; }
        else if (key == "jammer_power_db") config.jammer_power_db = parse_real_list(value, ctx);
        else if (key == "jammer_coupled") config.jammer_coupled = parse_bool(value, ctx);
        else if (key == "noise_power") config.noise_power = parse_real(value, ctx);
        else if (key == "k_secondary") config.k_secondary = parse_int(value, ctx);
        else if (key == "pfa") config.pfa = parse_real(value, ctx);
        else if (key == "calibration_trials") config.calibration_trials = parse_int(value, ctx);
        else if (key == "mc_trials") config.mc_trials = parse_int(value, ctx);
        else if (key == "master_seed") config.master_seed = parse_u64(value, ctx);
        else if (key == "sinr_grid_db") config.sinr_grid_db = parse_real_list(value, ctx);
        else if (key == "detectors") config.detectors = split_list(value);
        else if (key == "mm_epsilon") config.mm_epsilon = parse_real(value, ctx);
        else if (key == "mm_max_iters") config.mm_max_iters = parse_int(value, ctx);
        else if (key == "stage2_alpha") config.stage2_alpha = parse_real(value, ctx);
        else if (key == "target_delta_u") { config.target_delta_u = parse_real(value, ctx); has_delta_u = true; }
        else if (key == "target_angle_deg") { target_deg = parse_real(value, ctx); has_target_deg = true; }
        else if (key == "target_phase") config.target_phase = parse_real(value, ctx);
        else if (key == "scan_u0") { config.scan_u0 = parse_real(value, ctx); has_scan_u0 = true; }
        else if (key == "scan_angle_deg") { scan_deg = parse_real(value, ctx); has_scan_deg = true; }
        else if (key == "scan_step_deg") config.scan_step_deg = parse_real(value, ctx);
        else if (key == "scan_halfwidth_deg") config.scan_halfwidth_deg = parse_real(value, ctx);
        else if (key == "mflrt_log_form") config.mflrt_log_form = parse_bool(value, ctx);
        else if (key == "ben_doa_verbatim") config.ben_doa_verbatim = parse_bool(value, ctx);
        else if (key == "thresholds_file") config.thresholds_file = value;
        else ctx.fail("unknown key '" + key + "'");
    }

    const LineContext whole{origin, line_no};
    if (has_u_bar && has_look_deg) {
        whole.fail("give either u_bar or look_angle_deg, not both");
    }
    if (has_look_deg) config.u_bar = u_from_deg(look_deg);
    if (!has_alpha) config.alpha = 0.891 / config.n_elements;
    if (has_delta_u && has_target_deg) {
        whole.fail("give either target_delta_u or target_angle_deg, not both");
    }
    if (has_target_deg) config.target_delta_u = u_from_deg(target_deg) - config.u_bar;
    if (has_jammer_u && has_jammer_deg) {
        whole.fail("give either jammer_u or jammer_angle_deg, not both");
    }
    if (has_jammer_deg) {
        config.jammer_u.clear();
        for (const double deg : jammer_deg) config.jammer_u.push_back(u_from_deg(deg));
    }
    if (has_scan_u0 && has_scan_deg) {
        whole.fail("give either scan_u0 or scan_angle_deg, not both");
    }
    if (has_scan_deg) config.scan_u0 = u_from_deg(scan_deg);
    if (!has_scan_u0 && !has_scan_deg) config.scan_u0 = config.u_bar;

    if (config.jammer_u.size() != config.jammer_power_db.size()) {
        whole.fail("jammer_u and jammer_power_db must have the same length");
    }
    if (static_cast<int>(config.coupling_coeffs.size()) != config.coupling_order - 1) {
        whole.fail("coupling_coeffs must have coupling_order - 1 entries");
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config_text(buffer.str(), path);
}

void write_config_echo(std::ostream& os, const ExperimentConfig& config) {
    const auto list = [](const auto& items, const auto& fmt) {
        std::string out;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ' ';
            out += fmt(items[i]);
        }
        return out;
    };
    const auto real = [](double v) { return format_double(v); };
    os << "n_elements = " << config.n_elements << '\n'
       << "spacing_over_wavelength = " << real(config.spacing_over_wavelength) << '\n'
       << "u_bar = " << real(config.u_bar) << '\n'
       << "alpha = " << real(config.alpha) << '\n'
       << "coupling_order = " << config.coupling_order << '\n';
    if (!config.coupling_coeffs.empty()) {
        os << "coupling_coeffs = " << list(config.coupling_coeffs, format_complex) << '\n';
    }
    if (!config.jammer_u.empty()) {
        os << "jammer_u = " << list(config.jammer_u, real) << '\n'
           << "jammer_power_db = " << list(config.jammer_power_db, real) << '\n';
    }
    os << "jammer_coupled = " << (config.jammer_coupled ? "true" : "false") << '\n'
       << "noise_power = " << real(config.noise_power) << '\n'
       << "k_secondary = " << config.k_secondary << '\n'
       << "pfa = " << real(config.pfa) << '\n'
       << "calibration_trials = " << config.calibration_trials << '\n'
       << "mc_trials = " << config.mc_trials << '\n'
       << "master_seed = " << config.master_seed << '\n'
       << "sinr_grid_db = " << list(config.sinr_grid_db, real) << '\n'
       << "detectors = " << list(config.detectors, [](const std::string& s) { return s; }) << '\n'
       << "mm_epsilon = " << real(config.mm_epsilon) << '\n'
       << "mm_max_iters = " << config.mm_max_iters << '\n';
    if (config.stage2_alpha > 0.0) {
        os << "stage2_alpha = " << real(config.stage2_alpha) << '\n';
    }
    os << "target_delta_u = " << real(config.target_delta_u) << '\n'
       << "target_phase = " << real(config.target_phase) << '\n'
       << "scan_u0 = " << real(config.scan_u0) << '\n'
       << "scan_step_deg = " << real(config.scan_step_deg) << '\n'
       << "scan_halfwidth_deg = " << real(config.scan_halfwidth_deg) << '\n'
       << "mflrt_log_form = " << (config.mflrt_log_form ? "true" : "false") << '\n'
       << "ben_doa_verbatim = " << (config.ben_doa_verbatim ? "true" : "false") << '\n';
    if (!config.thresholds_file.empty()) {
        os << "thresholds_file = " << config.thresholds_file << '\n';
    }
}

EnvironmentSpec make_environment(const ExperimentConfig& config) {
    EnvironmentSpec env{
        ArrayGeometry(config.n_elements, config.spacing_over_wavelength),
        CouplingProfile(config.coupling_order, config.coupling_coeffs),
        {},
        config.noise_power,
        config.k_secondary,
        config.jammer_coupled,
    };
    for (std::size_t i = 0; i < config.jammer_u.size(); ++i) {
        env.jammers.push_back(JammerSpec{config.jammer_u[i], config.jammer_power_db[i]});
    }
    if (env.k_secondary < env.geometry.n_elements) {
        throw ConfigError("k_secondary must be at least n_elements");
    }
    return env;
}

HarnessSetup make_setup(const ExperimentConfig& config) {
    HarnessSetup setup{
        make_environment(config),
        PointingState(config.u_bar, config.alpha),
        MMConfig{config.mm_epsilon, config.mm_max_iters, config.alpha,
                 config.stage2_alpha},
        DetectorOptions{config.mflrt_log_form, config.ben_doa_verbatim},
        TargetTruth{},
    };
    setup.truth.u0 = config.u_bar + config.target_delta_u;
    setup.truth.delta_u = config.target_delta_u;
    setup.truth.amplitude = std::polar(1.0, config.target_phase);
    if (std::abs(setup.truth.u0) > 1.0) {
        throw ConfigError("target direction u_bar + target_delta_u leaves the visible region");
    }
    return setup;
}

std::vector<DetectorKind> make_detectors(const ExperimentConfig& config) {
    std::vector<DetectorKind> kinds;
    kinds.reserve(config.detectors.size());
    for (const std::string& token : config.detectors) {
        try {
            kinds.push_back(parse_detector(token, config.coupling_order));
        } catch (const IncompleteSpecification& e) {
            throw ConfigError(e.what());
        }
    }
    return kinds;
}

} // namespace lamdet
