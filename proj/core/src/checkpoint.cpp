#include "envopt/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "envopt/errors.hpp"

namespace envopt {

using nlohmann::json;

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const uint8_t* data, size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (size_t i = 0; i < len; i += 3) {
        uint32_t v = uint32_t(data[i]) << 16;
        if (i + 1 < len) v |= uint32_t(data[i + 1]) << 8;
        if (i + 2 < len) v |= uint32_t(data[i + 2]);
        out.push_back(kB64[(v >> 18) & 63]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kB64[v & 63] : '=');
    }
    return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<uint8_t> out;
    uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        int v = val(c);
        if (v < 0) throw ParseError("checkpoint: invalid base64 payload");
        acc = (acc << 6) | uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(uint8_t((acc >> bits) & 0xff));
        }
    }
    return out;
}

namespace {

std::string doubles_to_b64(const std::vector<double>& v) {
    return base64_encode(reinterpret_cast<const uint8_t*>(v.data()), v.size() * sizeof(double));
}

std::vector<double> b64_to_doubles(const std::string& text) {
    auto bytes = base64_decode(text);
    if (bytes.size() % sizeof(double) != 0)
        throw ParseError("checkpoint: payload size is not a multiple of 8");
    std::vector<double> out(bytes.size() / sizeof(double));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

} // namespace

void save_checkpoint(const Checkpoint& c, const std::string& path) {
    json j;
    j["version"] = c.version;
    j["policy_kind"] = c.policy_kind;
    j["arch"] = json::parse(c.arch.empty() ? "{}" : c.arch);
    j["seed"] = c.seed;
    j["iteration"] = c.iteration;
    j["theta_b64"] = doubles_to_b64(c.theta);
    j["omega_b64"] = doubles_to_b64(c.omega);
    j["lambda"] = c.lambda;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint file: " + path);
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open checkpoint file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("checkpoint JSON: ") + e.what());
    }
    try {
        Checkpoint c;
        c.version = j.at("version").get<int>();
        if (c.version != 1) throw ParseError("checkpoint: unsupported version");
        c.policy_kind = j.at("policy_kind").get<std::string>();
        c.arch = j.at("arch").dump();
        c.seed = j.at("seed").get<uint64_t>();
        c.iteration = j.at("iteration").get<int>();
        c.theta = b64_to_doubles(j.at("theta_b64").get<std::string>());
        c.omega = b64_to_doubles(j.at("omega_b64").get<std::string>());
        c.lambda = j.at("lambda").get<std::vector<double>>();
        return c;
    } catch (const json::exception& e) {
        throw ParseError(std::string("checkpoint JSON: ") + e.what());
    }
}

std::string arch_to_json(const GridPolicyConfig& cfg) {
    json j{{"grid_height", cfg.grid_height}, {"grid_width", cfg.grid_width},
           {"in_channels", cfg.in_channels}, {"conv_layers", cfg.conv_layers},
           {"conv_channels", cfg.conv_channels}, {"kernel", cfg.kernel},
           {"num_actions", cfg.num_actions}};
    return j.dump();
}

std::string arch_to_json(const GnnPolicyConfig& cfg) {
    json j{{"node_dim", cfg.node_dim},     {"edge_dim", cfg.edge_dim},
           {"msg_hidden", cfg.msg_hidden}, {"msg_out", cfg.msg_out},
           {"upd_hidden", cfg.upd_hidden}, {"upd_out", cfg.upd_out},
           {"stddev", cfg.stddev},         {"output_scale", cfg.output_scale}};
    return j.dump();
}

std::string arch_to_json(const TabularConfig& cfg) {
    json j{{"num_states", cfg.num_states}, {"num_actions", cfg.num_actions}};
    return j.dump();
}

GridPolicyConfig grid_config_from_json(const std::string& text) {
    json j = json::parse(text);
    GridPolicyConfig cfg;
    cfg.grid_height = j.value("grid_height", cfg.grid_height);
    cfg.grid_width = j.value("grid_width", cfg.grid_width);
    cfg.in_channels = j.value("in_channels", cfg.in_channels);
    cfg.conv_layers = j.value("conv_layers", cfg.conv_layers);
    cfg.conv_channels = j.value("conv_channels", cfg.conv_channels);
    cfg.kernel = j.value("kernel", cfg.kernel);
    cfg.num_actions = j.value("num_actions", cfg.num_actions);
    return cfg;
}

GnnPolicyConfig gnn_config_from_json(const std::string& text) {
    json j = json::parse(text);
    GnnPolicyConfig cfg;
    cfg.node_dim = j.value("node_dim", cfg.node_dim);
    cfg.edge_dim = j.value("edge_dim", cfg.edge_dim);
    cfg.msg_hidden = j.value("msg_hidden", cfg.msg_hidden);
    cfg.msg_out = j.value("msg_out", cfg.msg_out);
    cfg.upd_hidden = j.value("upd_hidden", cfg.upd_hidden);
    cfg.upd_out = j.value("upd_out", cfg.upd_out);
    cfg.stddev = j.value("stddev", cfg.stddev);
    cfg.output_scale = j.value("output_scale", cfg.output_scale);
    return cfg;
}

TabularConfig tabular_config_from_json(const std::string& text) {
    json j = json::parse(text);
    TabularConfig cfg;
    cfg.num_states = j.value("num_states", cfg.num_states);
    cfg.num_actions = j.value("num_actions", cfg.num_actions);
    return cfg;
}

} // namespace envopt
