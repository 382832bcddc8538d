#include "tpes/mps.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tpes/error.hpp"

namespace tpes {

std::string sanitize_mps_name(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-') c = '_';
    if (out.empty()) out = "_";
    return out;
}

namespace {

std::string num(double v) {
    if (v == kInf) return "1e30";
    if (v == -kInf) return "-1e30";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

char sense_tag(Sense s) {
    switch (s) {
        case Sense::le: return 'L';
        case Sense::ge: return 'G';
        case Sense::eq: return 'E';
    }
    return 'E';
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

double parse_num(const std::string& s, int lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw input_error("MPS line " + std::to_string(lineno) + ": cannot parse number '" + s + "'");
    }
}

}  // namespace

void write_mps(const MilpModel& model, const std::string& path) {
    for (const auto& v : model.vars())
        if (v.name.size() > 255) throw input_error("variable name longer than 255 characters: " + v.name);
    for (const auto& r : model.rows())
        if (r.name.size() > 255) throw input_error("row name longer than 255 characters: " + r.name);

    std::ofstream out(path);
    if (!out) throw io_error("cannot write MPS file '" + path + "'");

    out << "NAME " << sanitize_mps_name(model.name) << "\n";
    if (!model.minimize) out << "OBJSENSE\n MAX\n";
    out << "ROWS\n";
    out << " N  OBJ\n";
    for (const auto& r : model.rows()) out << " " << sense_tag(r.sense) << "  " << sanitize_mps_name(r.name) << "\n";

    // column-major view of the rows
    std::vector<std::vector<std::pair<int, double>>> cols(model.n_vars());
    for (std::size_t r = 0; r < model.n_rows(); ++r)
        for (auto& [c, v] : model.rows()[r].coeffs) cols[c].emplace_back(static_cast<int>(r), v);

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < model.n_vars(); ++j) {
        const auto& var = model.vars()[j];
        const bool want_int = var.kind == VarKind::binary;
        if (want_int != in_int) {
            out << "    MARKER" << marker << "  'MARKER'  " << (want_int ? "'INTORG'" : "'INTEND'") << "\n";
            ++marker;
            in_int = want_int;
        }
        const std::string name = sanitize_mps_name(var.name);
        double c = model.objective_coeff(static_cast<int>(j));
        bool wrote = false;
        if (c != 0.0) {
            out << "    " << name << "  OBJ  " << num(c) << "\n";
            wrote = true;
        }
        for (auto& [r, v] : cols[j]) {
            out << "    " << name << "  " << sanitize_mps_name(model.rows()[r].name) << "  " << num(v) << "\n";
            wrote = true;
        }
        if (!wrote) out << "    " << name << "  OBJ  0\n";  // keep the column present
    }
    if (in_int) out << "    MARKER" << marker << "  'MARKER'  'INTEND'\n";

    out << "RHS\n";
    if (model.objective_offset != 0.0) out << "    RHS  OBJ  " << num(-model.objective_offset) << "\n";
    for (const auto& r : model.rows())
        if (r.rhs != 0.0) out << "    RHS  " << sanitize_mps_name(r.name) << "  " << num(r.rhs) << "\n";

    out << "RANGES\n";  // none produced, section kept for completeness
    out << "BOUNDS\n";
    for (const auto& var : model.vars()) {
        const std::string name = sanitize_mps_name(var.name);
        const bool lb_fin = std::isfinite(var.lb), ub_fin = std::isfinite(var.ub);
        if (var.lb == var.ub) {
            out << " FX BND  " << name << "  " << num(var.lb) << "\n";
            continue;
        }
        if (!lb_fin && !ub_fin) {
            out << " FR BND  " << name << "\n";
            continue;
        }
        if (!lb_fin) out << " MI BND  " << name << "\n";
        else if (var.lb != 0.0) out << " LO BND  " << name << "  " << num(var.lb) << "\n";
        if (ub_fin) out << " UP BND  " << name << "  " << num(var.ub) << "\n";
    }
    out << "ENDATA\n";
    if (!out) throw io_error("error while writing MPS file '" + path + "'");
}

MilpModel read_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open MPS file '" + path + "'");

    MilpModel model;
    enum Section { none, objsense, rows, columns, rhs, ranges, bounds, done };
    Section sec = none;

    struct RowInfo {
        Sense sense;
        bool is_obj = false;
    };
    std::unordered_map<std::string, RowInfo> row_kind;
    std::string obj_name;
    std::unordered_map<std::string, std::vector<std::pair<std::string, double>>> col_entries;
    std::unordered_map<std::string, double> obj_entries;
    std::vector<std::string> col_order;
    std::unordered_map<std::string, bool> col_is_int;
    std::unordered_map<std::string, double> rhs_map;
    double obj_rhs = 0.0;
    std::unordered_map<std::string, double> range_map;
    struct BoundMod {
        std::string type, col;
        double value;
    };
    std::vector<BoundMod> bound_mods;
    bool in_int = false;
    std::vector<std::string> row_order;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        const bool is_header = !std::isspace(static_cast<unsigned char>(line[0]));
        std::vector<std::string> toks = tokenize(line);
        if (toks.empty()) continue;

        if (is_header) {
            const std::string& h = toks[0];
            if (h == "NAME") {
                model.name = toks.size() > 1 ? toks[1] : "model";
            } else if (h == "OBJSENSE") {
                sec = objsense;
            } else if (h == "ROWS") {
                sec = rows;
            } else if (h == "COLUMNS") {
                sec = columns;
            } else if (h == "RHS") {
                sec = rhs;
            } else if (h == "RANGES") {
                sec = ranges;
            } else if (h == "BOUNDS") {
                sec = bounds;
            } else if (h == "ENDATA") {
                sec = done;
                break;
            } else if (h == "MAXIMIZE" || h == "MINIMIZE") {
                model.minimize = h == "MINIMIZE";
                sec = objsense;
            } else {
                throw input_error("MPS line " + std::to_string(lineno) + ": unsupported section '" + h + "'");
            }
            continue;
        }

        switch (sec) {
            case objsense:
                if (toks[0] == "MAX" || toks[0] == "MAXIMIZE") model.minimize = false;
                else if (toks[0] == "MIN" || toks[0] == "MINIMIZE") model.minimize = true;
                else throw input_error("MPS line " + std::to_string(lineno) + ": bad OBJSENSE value");
                break;
            case rows: {
                if (toks.size() < 2) throw input_error("MPS line " + std::to_string(lineno) + ": malformed ROWS entry");
                const std::string& tag = toks[0];
                const std::string& name = toks[1];
                if (tag == "N") {
                    if (obj_name.empty()) obj_name = name;
                    row_kind[name] = {Sense::eq, true};
                } else if (tag == "L" || tag == "G" || tag == "E") {
                    Sense s = tag == "L" ? Sense::le : tag == "G" ? Sense::ge : Sense::eq;
                    row_kind[name] = {s, false};
                    row_order.push_back(name);
                } else {
                    throw input_error("MPS line " + std::to_string(lineno) + ": unsupported row type '" + tag + "'");
                }
                break;
            }
            case columns: {
                if (toks.size() >= 3 && toks[1] == "'MARKER'") {
                    if (toks[2] == "'INTORG'") in_int = true;
                    else if (toks[2] == "'INTEND'") in_int = false;
                    else throw input_error("MPS line " + std::to_string(lineno) + ": unknown marker");
                    break;
                }
                if (toks.size() != 3 && toks.size() != 5)
                    throw input_error("MPS line " + std::to_string(lineno) + ": malformed COLUMNS entry");
                const std::string& col = toks[0];
                if (!col_entries.count(col) && !obj_entries.count(col)) {
                    col_order.push_back(col);
                    col_entries[col];  // create
                    col_is_int[col] = in_int;
                }
                for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
                    const std::string& row = toks[k];
                    double v = parse_num(toks[k + 1], lineno);
                    auto it = row_kind.find(row);
                    if (it == row_kind.end())
                        throw input_error("MPS line " + std::to_string(lineno) + ": unknown row '" + row + "'");
                    if (it->second.is_obj) {
                        if (row == obj_name) obj_entries[col] += v;
                    } else {
                        col_entries[col].emplace_back(row, v);
                    }
                }
                break;
            }
            case rhs: {
                if (toks.size() != 3 && toks.size() != 5)
                    throw input_error("MPS line " + std::to_string(lineno) + ": malformed RHS entry");
                for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
                    const std::string& row = toks[k];
                    double v = parse_num(toks[k + 1], lineno);
                    auto it = row_kind.find(row);
                    if (it == row_kind.end())
                        throw input_error("MPS line " + std::to_string(lineno) + ": unknown RHS row '" + row + "'");
                    if (it->second.is_obj) obj_rhs = v;
                    else rhs_map[row] = v;
                }
                break;
            }
            case ranges: {
                if (toks.size() != 3 && toks.size() != 5)
                    throw input_error("MPS line " + std::to_string(lineno) + ": malformed RANGES entry");
                for (std::size_t k = 1; k + 1 < toks.size(); k += 2)
                    range_map[toks[k]] = parse_num(toks[k + 1], lineno);
                break;
            }
            case bounds: {
                if (toks.size() < 3) throw input_error("MPS line " + std::to_string(lineno) + ": malformed BOUNDS entry");
                BoundMod b;
                b.type = toks[0];
                b.col = toks[2];
                b.value = toks.size() > 3 ? parse_num(toks[3], lineno) : 0.0;
                bound_mods.push_back(b);
                break;
            }
            default:
                throw input_error("MPS line " + std::to_string(lineno) + ": data before a section header");
        }
    }
    if (sec != done) throw input_error("MPS file '" + path + "' has no ENDATA");

    // default bounds: continuous [0, inf); integer inside markers [0, 1]
    for (const auto& col : col_order) {
        bool is_int = col_is_int[col];
        model.add_var(col, 0.0, is_int ? 1.0 : kInf, is_int ? VarKind::binary : VarKind::continuous);
    }
    for (const auto& b : bound_mods) {
        int j = model.var_id(b.col);
        if (j < 0) throw input_error("BOUNDS entry for unknown column '" + b.col + "'");
        double lb = model.vars()[j].lb, ub = model.vars()[j].ub;
        if (b.type == "UP") ub = b.value;
        else if (b.type == "LO") lb = b.value;
        else if (b.type == "FX") lb = ub = b.value;
        else if (b.type == "FR") { lb = -kInf; ub = kInf; }
        else if (b.type == "MI") lb = -kInf;
        else if (b.type == "PL") ub = kInf;
        else if (b.type == "BV") { lb = 0; ub = 1; }
        else throw input_error("unsupported bound type '" + b.type + "'");
        if (b.type == "UP" && b.value >= 1e30) ub = kInf;
        if (b.type == "LO" && b.value <= -1e30) lb = -kInf;
        model.set_var_bounds(j, lb, ub);
    }

    // rows in declaration order; RANGES turn one row into a two-sided pair
    std::unordered_map<std::string, std::vector<std::pair<int, double>>> row_coeffs;
    for (const auto& col : col_order) {
        int j = model.var_id(col);
        for (auto& [row, v] : col_entries[col]) row_coeffs[row].emplace_back(j, v);
    }
    for (const auto& rn : row_order) {
        const RowInfo& info = row_kind[rn];
        double b = rhs_map.count(rn) ? rhs_map[rn] : 0.0;
        auto rit = range_map.find(rn);
        if (rit == range_map.end()) {
            model.add_row(rn, row_coeffs[rn], info.sense, b);
            continue;
        }
        // ranged row becomes the interval [lo, hi]
        double r = rit->second, lo, hi;
        if (info.sense == Sense::le) { lo = b - std::abs(r); hi = b; }
        else if (info.sense == Sense::ge) { lo = b; hi = b + std::abs(r); }
        else { lo = r >= 0 ? b : b + r; hi = r >= 0 ? b + r : b; }
        model.add_row(rn, row_coeffs[rn], Sense::ge, lo);
        model.add_row(rn + "__range", row_coeffs[rn], Sense::le, hi);
    }
    for (const auto& col : col_order) {
        double c = obj_entries.count(col) ? obj_entries[col] : 0.0;
        if (c != 0.0) model.add_objective_term(model.var_id(col), c);
    }
    model.objective_offset = -obj_rhs;
    return model;
}

}  // namespace tpes
