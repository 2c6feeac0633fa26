#include "mg/io.hpp"

#include <fstream>
#include <sstream>

#include "mg/payoffs.hpp"
#include "mg/qcqp.hpp"

namespace mg {

using nlohmann::json;

json to_json(const Rational& q) { return q.get_str(); }

json to_json(const Vec& v) {
    json out = json::array();
    for (const auto& q : v) out.push_back(to_json(q));
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(to_json(row));
    return out;
}

Rational rational_from_json(const json& j) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(mpz_class(j.dump()));
    } catch (const ParseError& e) {
        throw InputError("MalformedRational", e.what());
    }
    throw InputError("MalformedRational", "expected \"p/q\" string or integer, got " + j.dump());
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw InputError("Schema", "expected an array of rationals");
    Vec v;
    for (const auto& e : j) v.push_back(rational_from_json(e));
    return v;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("Schema", "expected a non-empty matrix");
    Matrix m;
    for (const auto& row : j) m.push_back(vec_from_json(row));
    for (const auto& row : m)
        if (row.size() != m[0].size() || row.empty()) throw InputError("DimensionMismatch", "ragged matrix");
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("FileNotFound", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InputError("FileNotWritable", "cannot write " + path);
    out << content;
}

namespace {

GameClass parse_class(const std::string& s) {
    if (s == "zero_sum") return GameClass::ZeroSum;
    if (s == "strictly_competitive") return GameClass::StrictlyCompetitive;
    if (s == "repeated") return GameClass::Repeated;
    if (s == "general") return GameClass::General;
    throw InputError("Schema", "unknown game class '" + s + "'");
}

ModelKind parse_kind(const std::string& s) {
    if (s == "additive_separable") return ModelKind::AdditiveSeparable;
    if (s == "roommates") return ModelKind::Roommates;
    if (s == "general") return ModelKind::General;
    throw InputError("Schema", "unknown model '" + s + "'");
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InputError("Schema", where + ": missing field '" + key + "'");
    return j.at(key);
}

Agent parse_agent(const json& j, bool hospital) {
    Agent a;
    a.id = field(j, "id", "agent").get<std::string>();
    a.irp = j.contains("irp") ? rational_from_json(j.at("irp")) : Rational(0);
    if (j.contains("strategies")) {
        const json& s = j.at("strategies");
        if (s.is_number_integer()) {
            long n = s.get<long>();
            if (n < 0) throw InputError("Schema", a.id + ": negative strategy count");
            for (long i = 0; i < n; ++i) a.strategies.push_back(std::to_string(i));
        } else if (s.is_array()) {
            for (const auto& e : s) a.strategies.push_back(e.get<std::string>());
        } else {
            throw InputError("Schema", a.id + ": strategies must be a count or a list of names");
        }
    }
    if (hospital) {
        if (!j.contains("quota")) throw InputError("Schema", a.id + ": missing quota");
        long q = j.at("quota").get<long>();
        if (q < 1) throw InputError("QuotaOutOfRange", "hospital " + a.id + " has quota " + std::to_string(q));
        a.quota = static_cast<int>(q);
        if (j.contains("passive")) a.passive = j.at("passive").get<bool>();
    }
    return a;
}

}  // namespace

void validate_game(const BimatrixGame& g, const std::string& where) {
    if (g.A.size() != g.M.size())
        throw InputError("DimensionMismatch", where + ": A and M have different row counts");
    for (std::size_t s = 0; s < g.A.size(); ++s)
        if (g.A[s].size() != g.M[s].size())
            throw InputError("DimensionMismatch", where + ": A and M have different column counts");
    if (g.cls == GameClass::ZeroSum) {
        for (std::size_t s = 0; s < g.A.size(); ++s)
            for (std::size_t t = 0; t < g.A[s].size(); ++t)
                if (g.M[s][t] != -g.A[s][t])
                    throw InputError("ClassTagViolation", where + ": M != -A at entry (" + std::to_string(s + 1) +
                                                              "," + std::to_string(t + 1) + ")");
    } else if (g.cls == GameClass::StrictlyCompetitive) {
        try {
            affine_transform(g.A, g.M);
        } catch (const NotStrictlyCompetitive& e) {
            throw InputError("NotStrictlyCompetitive", where + ": " + e.what());
        }
    }
}

Instance load_instance(const std::string& text, const LoadOptions& opt) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError("Schema", std::string("invalid document: ") + e.what());
    }
    Instance inst;
    try {
        inst.kind = parse_kind(field(doc, "model", "document").get<std::string>());
        for (const auto& d : field(doc, "doctors", "document")) inst.doctors.push_back(parse_agent(d, false));
        if (inst.kind != ModelKind::Roommates && doc.contains("hospitals"))
            for (const auto& h : doc.at("hospitals")) inst.hospitals.push_back(parse_agent(h, true));
    } catch (const json::exception& e) {
        throw InputError("Schema", e.what());
    }
    for (std::size_t i = 0; i < inst.doctors.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (inst.doctors[i].id == inst.doctors[j].id) throw InputError("Schema", "duplicate doctor id " + inst.doctors[i].id);

    if (doc.contains("games")) {
        for (const auto& gj : doc.at("games")) {
            BimatrixGame g;
            std::string did = field(gj, "doctor", "game").get<std::string>();
            int d = inst.doctor_index(did);
            if (d < 0) throw InputError("UnknownAgent", "game references unknown doctor " + did);
            g.cls = parse_class(gj.contains("class") ? gj.at("class").get<std::string>() : "general");
            g.A = matrix_from_json(field(gj, "A", "game"));
            if (gj.contains("M"))
                g.M = matrix_from_json(gj.at("M"));
            else if (g.cls == GameClass::ZeroSum)
                g.M = negate(g.A);
            else
                throw InputError("Schema", "game " + did + ": missing M");
            int other;
            std::string where;
            if (inst.kind == ModelKind::Roommates) {
                std::string oid = field(gj, "doctor2", "game").get<std::string>();
                other = inst.doctor_index(oid);
                if (other < 0) throw InputError("UnknownAgent", "game references unknown doctor " + oid);
                if (other == d) throw InputError("Schema", "roommates game pairs doctor " + did + " with itself");
                where = "game (" + did + "," + oid + ")";
                if (g.A.size() != inst.doctors[d].strategies.size() ||
                    g.A[0].size() != inst.doctors[other].strategies.size())
                    throw InputError("DimensionMismatch", where + ": matrix shape differs from strategy counts");
                validate_game(g, where);
                if (other < d) {
                    BimatrixGame sw;
                    sw.cls = g.cls;
                    sw.A = transpose(g.M);
                    sw.M = transpose(g.A);
                    g = std::move(sw);
                    std::swap(d, other);
                }
            } else {
                std::string hid = field(gj, "hospital", "game").get<std::string>();
                other = inst.hospital_index(hid);
                if (other < 0) throw InputError("UnknownAgent", "game references unknown hospital " + hid);
                where = "game (" + did + "," + hid + ")";
                if (g.A.size() != inst.doctors[d].strategies.size() ||
                    g.A[0].size() != inst.hospitals[other].strategies.size())
                    throw InputError("DimensionMismatch", where + ": matrix shape differs from strategy counts");
                validate_game(g, where);
            }
            if (!inst.games.emplace(std::make_pair(d, other), std::move(g)).second)
                throw InputError("Schema", where + ": duplicate game");
        }
    }

    if (inst.kind == ModelKind::General) {
        const std::size_t nd = inst.doctors.size();
        if (nd > opt.max_general_doctors || nd > 31)
            throw InputError("CapExceeded", "general model limited to " + std::to_string(opt.max_general_doctors) + " doctors");
        if (doc.contains("coalitions")) {
            for (const auto& cj : doc.at("coalitions")) {
                std::string hid = field(cj, "hospital", "coalition").get<std::string>();
                std::vector<int> hs;
                if (hid == "*") {
                    for (std::size_t h = 0; h < inst.hospitals.size(); ++h) hs.push_back(static_cast<int>(h));
                } else {
                    int h = inst.hospital_index(hid);
                    if (h < 0) throw InputError("UnknownAgent", "coalition references unknown hospital " + hid);
                    hs.push_back(h);
                }
                Coalition mask = 0;
                for (const auto& m : field(cj, "members", "coalition")) {
                    int d = inst.doctor_index(m.get<std::string>());
                    if (d < 0) throw InputError("UnknownAgent", "coalition references unknown doctor " + m.dump());
                    mask |= Coalition(1) << d;
                }
                CoalitionPayoff p;
                p.doctor = vec_from_json(field(cj, "doctor_payoffs", "coalition"));
                if (p.doctor.size() != static_cast<std::size_t>(__builtin_popcount(mask)))
                    throw InputError("DimensionMismatch", "coalition payoff count differs from member count");
                p.hospital = cj.contains("hospital_payoff") ? rational_from_json(cj.at("hospital_payoff")) : Rational(0);
                for (int h : hs) inst.coalitions[{h, mask}] = p;
            }
        }
        const std::size_t cap = (std::size_t(1) << nd) * std::max<std::size_t>(1, inst.hospitals.size());
        if (inst.coalitions.size() > cap) throw InputError("CapExceeded", "coalition table larger than 2^|D|*|H|");
    }
    return inst;
}

Instance load_instance_file(const std::string& path, const LoadOptions& opt) { return load_instance(read_file(path), opt); }

json instance_to_json(const Instance& inst) {
    json doc;
    doc["model"] = to_string(inst.kind);
    auto agent = [](const Agent& a, bool hospital) {
        json j;
        j["id"] = a.id;
        j["irp"] = to_json(a.irp);
        j["strategies"] = a.strategies;
        if (hospital) j["quota"] = a.quota;
        if (hospital && a.passive) j["passive"] = true;
        return j;
    };
    doc["doctors"] = json::array();
    for (const auto& d : inst.doctors) doc["doctors"].push_back(agent(d, false));
    if (inst.kind != ModelKind::Roommates) {
        doc["hospitals"] = json::array();
        for (const auto& h : inst.hospitals) doc["hospitals"].push_back(agent(h, true));
    }
    doc["games"] = json::array();
    for (const auto& [key, g] : inst.games) {
        json j;
        j["doctor"] = inst.doctors[key.first].id;
        if (inst.kind == ModelKind::Roommates)
            j["doctor2"] = inst.doctors[key.second].id;
        else
            j["hospital"] = inst.hospitals[key.second].id;
        j["class"] = to_string(g.cls);
        j["A"] = to_json(g.A);
        j["M"] = to_json(g.M);
        doc["games"].push_back(j);
    }
    if (inst.kind == ModelKind::General) {
        doc["coalitions"] = json::array();
        for (const auto& [key, p] : inst.coalitions) {
            json j;
            j["hospital"] = inst.hospitals[key.first].id;
            j["members"] = json::array();
            for (std::size_t d = 0; d < inst.doctors.size(); ++d)
                if (key.second & (Coalition(1) << d)) j["members"].push_back(inst.doctors[d].id);
            j["doctor_payoffs"] = to_json(p.doctor);
            j["hospital_payoff"] = to_json(p.hospital);
            doc["coalitions"].push_back(j);
        }
    }
    return doc;
}

std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

namespace {

json cycle_to_json(const CycleStrategy& c) {
    json j;
    j["profiles"] = json::array();
    for (const auto& [s, t] : c.cycle) j["profiles"].push_back({s, t});
    if (!c.repeats.empty()) j["repeats"] = c.repeats;
    j["hospital_punishes"] = c.hospital_punishes;
    j["doctor_punishes"] = c.doctor_punishes;
    if (c.hospital_punishes) j["hospital_punishment"] = to_json(c.hospital_punishment);
    if (c.doctor_punishes) j["doctor_punishment"] = to_json(c.doctor_punishment);
    return j;
}

CycleStrategy cycle_from_json(const json& j) {
    CycleStrategy c;
    for (const auto& p : field(j, "profiles", "cycle")) c.cycle.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    if (c.cycle.empty()) throw InputError("Schema", "empty cycle");
    if (j.contains("repeats")) {
        c.repeats = j.at("repeats").get<std::vector<long>>();
        if (c.repeats.size() != c.cycle.size()) throw InputError("Schema", "cycle repeats and profiles differ in length");
        for (long r : c.repeats)
            if (r < 1) throw InputError("Schema", "cycle repeats must be positive");
    }
    c.hospital_punishes = j.value("hospital_punishes", false);
    c.doctor_punishes = j.value("doctor_punishes", false);
    if (c.hospital_punishes) c.hospital_punishment = vec_from_json(field(j, "hospital_punishment", "cycle"));
    if (c.doctor_punishes) c.doctor_punishment = vec_from_json(field(j, "doctor_punishment", "cycle"));
    return c;
}

}  // namespace

json allocation_to_json(const Instance& inst, const Allocation& alloc) {
    json doc;
    doc["matching"] = json::array();
    const bool room = inst.kind == ModelKind::Roommates;
    for (std::size_t d = 0; d < alloc.match.size(); ++d) {
        int p = alloc.match[d];
        if (p < 0) continue;
        if (room && p < static_cast<int>(d)) continue;
        json j;
        j["doctor"] = inst.doctors[d].id;
        if (room)
            j["partner"] = inst.doctors[p].id;
        else
            j["hospital"] = inst.hospitals[p].id;
        auto it = alloc.profiles.find({static_cast<int>(d), p});
        if (it != alloc.profiles.end()) {
            if (!it->second.x.empty()) j["x"] = to_json(it->second.x);
            if (!it->second.y.empty()) j["y"] = to_json(it->second.y);
            if (it->second.cycle) j["cycle"] = cycle_to_json(*it->second.cycle);
        }
        doc["matching"].push_back(j);
    }
    doc["unmatched"] = json::array();
    for (std::size_t d = 0; d < alloc.match.size(); ++d)
        if (alloc.match[d] < 0) doc["unmatched"].push_back(inst.doctors[d].id);
    return doc;
}

std::string serialize_allocation(const Instance& inst, const Allocation& alloc) {
    return allocation_to_json(inst, alloc).dump(2) + "\n";
}

Allocation load_allocation(const Instance& inst, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError("Schema", std::string("invalid allocation document: ") + e.what());
    }
    Allocation alloc = empty_allocation(inst);
    const bool room = inst.kind == ModelKind::Roommates;
    for (const auto& j : field(doc, "matching", "allocation")) {
        std::string did = field(j, "doctor", "matching entry").get<std::string>();
        int d = inst.doctor_index(did);
        if (d < 0) throw InputError("UnknownAgent", "allocation references unknown doctor " + did);
        int p;
        if (room) {
            std::string pid = field(j, "partner", "matching entry").get<std::string>();
            p = inst.doctor_index(pid);
            if (p < 0 || p == d) throw InputError("UnknownAgent", "bad partner " + pid);
        } else {
            std::string hid = field(j, "hospital", "matching entry").get<std::string>();
            p = inst.hospital_index(hid);
            if (p < 0) throw InputError("UnknownAgent", "allocation references unknown hospital " + hid);
        }
        if (alloc.match[d] >= 0) throw InputError("Schema", "doctor " + did + " matched twice");
        alloc.match[d] = p;
        if (room) {
            if (alloc.match[p] >= 0) throw InputError("Schema", "doctor " + inst.doctors[p].id + " matched twice");
            alloc.match[p] = d;
        }
        if (inst.kind == ModelKind::General) continue;
        Profile prof;
        if (j.contains("x")) prof.x = vec_from_json(j.at("x"));
        if (j.contains("y")) prof.y = vec_from_json(j.at("y"));
        if (j.contains("cycle")) prof.cycle = cycle_from_json(j.at("cycle"));
        std::pair<int, int> key{d, p};
        if (room && p < d) {
            key = {p, d};
            std::swap(prof.x, prof.y);
            if (prof.cycle)
                for (auto& st : prof.cycle->cycle) std::swap(st.first, st.second);
        }
        const BimatrixGame* g = inst.game(key.first, key.second);
        if (!g) throw InputError("UnknownAgent", "no game for matched pair of doctor " + did);
        if (prof.cycle) {
            for (const auto& [s, t] : prof.cycle->cycle)
                if (s < 0 || t < 0 || static_cast<std::size_t>(s) >= g->rows() || static_cast<std::size_t>(t) >= g->cols())
                    throw InputError("DimensionMismatch", "cycle profile out of range for doctor " + did);
        } else {
            if (prof.x.size() != g->rows() || prof.y.size() != g->cols())
                throw InputError("DimensionMismatch", "strategy lengths differ from the game for doctor " + did);
            if (!is_distribution(prof.x) || !is_distribution(prof.y))
                throw InputError("NotADistribution", "strategy of doctor " + did + " is not a distribution");
        }
        alloc.profiles[key] = std::move(prof);
    }
    return alloc;
}

}  // namespace mg
