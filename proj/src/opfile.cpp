#include "dvar/opfile.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "dvar/numfmt.hpp"

namespace dvar {

namespace {

std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        if (!kv.emplace(key, line.substr(eq + 1)).second)
            throw Error(path + ": duplicate key '" + key + "'");
    }
    if (!kv.count("role")) throw Error(path + ": missing 'role'");
    return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& path) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(path + ": missing '" + key + "'");
    return it->second;
}

} // namespace

SecondOrderOp load_fde_file(const std::string& path) {
    const auto kv = read_kv(path);
    if (kv.at("role") != "fde")
        throw Error(path + ": expected role=fde, found role=" + kv.at("role"));
    std::string label;
    if (auto it = kv.find("label"); it != kv.end()) label = it->second;
    return SecondOrderOp::parse(require(kv, "expr", path), label);
}

ContinuousOp load_continuous_file(const std::string& path) {
    const auto kv = read_kv(path);
    if (kv.at("role") != "continuous")
        throw Error(path + ": expected role=continuous, found role=" + kv.at("role"));
    return ContinuousOp::parse(require(kv, "expr", path));
}

LagrangianCouple load_couple_file(const std::string& path) {
    const auto kv = read_kv(path);
    const std::string& role = kv.at("role");
    if (role == "lagrangian")
        return couple_from_exprs(require(kv, "expr", path), "0");
    if (role != "lagrangian_couple")
        throw Error(path + ": expected role=lagrangian_couple, found role=" + role);
    if (kv.count("source_op")) {
        const int order = std::atoi(require(kv, "quad_order", path).c_str());
        const double y0 = kv.count("anchor_y0") ? std::strtod(kv.at("anchor_y0").c_str(), nullptr) : 0.0;
        const double z0 = kv.count("anchor_z0") ? std::strtod(kv.at("anchor_z0").c_str(), nullptr) : 0.0;
        std::string label;
        if (auto it = kv.find("source_label"); it != kv.end()) label = it->second;
        return synthesize(SecondOrderOp::parse(kv.at("source_op"), label), order, y0, z0);
    }
    return couple_from_exprs(require(kv, "l_minus", path), require(kv, "l_plus", path));
}

void save_op_file(const SecondOrderOp& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "role=fde\n";
    out << "expr=" << op.body().to_string() << "\n";
    if (!op.label().empty()) out << "label=" << op.label() << "\n";
}

void save_couple_file(const LagrangianCouple& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "role=lagrangian_couple\n";
    if (c.synth) {
        // Synthesized couples are reconstructed from the recipe, not tabulated.
        out << "source_op=" << c.synth->op_text << "\n";
        if (!c.synth->op_label.empty()) out << "source_label=" << c.synth->op_label << "\n";
        out << "quad_order=" << c.synth->quad_order << "\n";
        out << "anchor_y0=" << shortest_repr(c.synth->anchor_y0) << "\n";
        out << "anchor_z0=" << shortest_repr(c.synth->anchor_z0) << "\n";
        return;
    }
    if (!c.l_minus_expr || !c.l_plus_expr)
        throw Error("only expression-backed or synthesized couples can be saved");
    out << "l_minus=" << c.l_minus_expr->to_string() << "\n";
    out << "l_plus=" << c.l_plus_expr->to_string() << "\n";
}

} // namespace dvar
