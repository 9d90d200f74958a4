#include "folio/ndcore/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace folio::nd {

using nlohmann::json;

void save_checkpoint(const Graph& graph, const std::string& path) {
    json params = json::object();
    for (const auto& name : graph.param_names()) {
        const Tensor& t = graph.param_value(name);
        params[name] = {{"shape", t.shape}, {"data", t.data}};
    }
    json doc = {{"format_version", 1}, {"params", params}};
    std::ofstream out(path);
    require(out.good(), "checkpoint: cannot open '", path, "' for writing");
    out << doc.dump(2) << "\n";
    require(out.good(), "checkpoint: write to '", path, "' failed");
}

void load_checkpoint(Graph& graph, const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "checkpoint: cannot open '", path, "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail("checkpoint: '", path, "' is not valid JSON: ", e.what());
    }
    require(doc.value("format_version", 0) == 1, "checkpoint: unsupported format in '",
            path, "'");
    require(doc.contains("params") && doc["params"].is_object(),
            "checkpoint: missing params object in '", path, "'");
    const json& params = doc["params"];

    std::string missing, extra, mismatched;
    for (const auto& name : graph.param_names())
        if (!params.contains(name)) missing += " " + name;
    for (const auto& [name, entry] : params.items()) {
        if (!graph.has_param(name)) {
            extra += " " + name;
            continue;
        }
        const Shape shape = entry.at("shape").get<Shape>();
        const Tensor& p = graph.param_value(name);
        if (shape != p.shape)
            mismatched += " " + name + " (checkpoint " + shape_str(shape) + ", graph " +
                          shape_str(p.shape) + ")";
    }
    require(missing.empty() && extra.empty() && mismatched.empty(),
            "checkpoint: architecture mismatch in '", path, "':",
            missing.empty() ? "" : " missing:" + missing,
            extra.empty() ? "" : " unexpected:" + extra,
            mismatched.empty() ? "" : " shape:" + mismatched);

    for (const auto& name : graph.param_names()) {
        const json& entry = params.at(name);
        Tensor& p = graph.param_value(name);
        std::vector<double> data = entry.at("data").get<std::vector<double>>();
        require(data.size() == p.numel(), "checkpoint: data length for '", name,
                "' does not match shape");
        p.data = std::move(data);
    }
}

} // namespace folio::nd
