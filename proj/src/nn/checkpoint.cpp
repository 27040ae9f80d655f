#include "hvrp/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "hvrp/core/errors.hpp"

namespace hvrp::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

using nlohmann::json;

json config_to_json(const PolicyConfig& c) {
    return {{"hidden", c.hidden},       {"edge_hidden", c.edge_hidden}, {"heads", c.heads},
            {"layers", c.layers},       {"ff_hidden", c.ff_hidden},     {"clip", c.clip},
            {"leaky_slope", c.leaky_slope}, {"bn_eps", c.bn_eps},       {"bn_momentum", c.bn_momentum},
            {"tsp", c.tsp}};
}

PolicyConfig config_from_json(const json& j) {
    PolicyConfig c;
    c.hidden = j.at("hidden").get<int>();
    c.edge_hidden = j.at("edge_hidden").get<int>();
    c.heads = j.at("heads").get<int>();
    c.layers = j.at("layers").get<int>();
    c.ff_hidden = j.at("ff_hidden").get<int>();
    c.clip = j.at("clip").get<double>();
    c.leaky_slope = j.at("leaky_slope").get<double>();
    c.bn_eps = j.at("bn_eps").get<double>();
    c.bn_momentum = j.at("bn_momentum").get<double>();
    c.tsp = j.at("tsp").get<bool>();
    return c;
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const char* what) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw CheckpointError(std::string("truncated checkpoint (") + what + ")");
    return v;
}

}  // namespace

void save_checkpoint(const PolicyParams& params, std::ostream& out) {
    json header;
    header["format"] = "hvrp-policy";
    header["config"] = config_to_json(params.config);
    header["trained_on"] = params.trained_on;
    header["epochs_trained"] = params.epochs_trained;
    json table = json::array();
    for (const auto& [name, t] : params.tensors)
        table.push_back({{"name", name}, {"rows", t.rows}, {"cols", t.cols}, {"dtype", "f64"}});
    header["tensors"] = table;
    const std::string text = header.dump();
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, t] : params.tensors)
        out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!out) throw CheckpointError("failed to write checkpoint");
}

void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write " + path.string());
    save_checkpoint(params, out);
}

PolicyParams load_checkpoint(std::istream& in) {
    char magic[sizeof kCheckpointMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
        throw CheckpointError("not a policy checkpoint (bad magic bytes)");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    const auto len = get<std::uint64_t>(in, "header length");
    if (len > (1u << 26)) throw CheckpointError("implausible checkpoint header length");
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw CheckpointError("truncated checkpoint header");

    PolicyParams p;
    try {
        const json header = json::parse(text);
        if (header.at("format") != "hvrp-policy") throw CheckpointError("unexpected checkpoint format tag");
        p.config = config_from_json(header.at("config"));
        p.trained_on = header.at("trained_on").get<std::vector<std::string>>();
        p.epochs_trained = header.at("epochs_trained").get<int>();
        for (const json& t : header.at("tensors")) {
            if (t.at("dtype") != "f64") throw CheckpointError("unsupported tensor dtype");
            const int rows = t.at("rows").get<int>();
            const int cols = t.at("cols").get<int>();
            if (rows < 0 || cols < 0) throw CheckpointError("negative tensor shape");
            p.tensors.emplace(t.at("name").get<std::string>(), Tensor(rows, cols));
        }
        // The data section follows the table order, which is the sorted name
        // order the writer used.
        for (const json& t : header.at("tensors")) {
            Tensor& dst = p.tensors.at(t.at("name").get<std::string>());
            if (!in.read(reinterpret_cast<char*>(dst.data.data()), static_cast<std::streamsize>(dst.data.size() * sizeof(double))))
                throw CheckpointError("truncated tensor data for " + t.at("name").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
    }
    try {
        p.config.validate();
    } catch (const InvalidInput& e) {
        throw CheckpointError(std::string("invalid checkpoint config: ") + e.what());
    }
    p.check_shapes();
    return p;
}

PolicyParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    return load_checkpoint(in);
}

}  // namespace hvrp::nn
