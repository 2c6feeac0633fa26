#include "mg/contracts.hpp"

#include <algorithm>
#include <functional>

#include "mg/generator.hpp"
#include "mg/io.hpp"
#include "mg/qcqp.hpp"

namespace mg {

std::vector<int> ContractModel::of_hospital(int h) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < contracts.size(); ++i)
        if (contracts[i].hospital == h) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> ContractModel::of_doctor(int d) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < contracts.size(); ++i)
        if (contracts[i].doctor == d) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

std::vector<std::string> ids_of(const ContractModel& m, const ContractSet& s) {
    std::vector<std::string> ids;
    for (int c : s) ids.push_back(m.contracts[c].id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

ContractSet sorted(ContractSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

ContractSet with(ContractSet s, int x) {
    s.push_back(x);
    return sorted(std::move(s));
}

ContractSet restrict_hospital(const ContractModel& m, const ContractSet& s, int h) {
    ContractSet out;
    for (int c : s)
        if (m.contracts[c].hospital == h) out.push_back(c);
    return sorted(out);
}

ContractSet additive_choice(const ContractModel& m, const HospitalPreference& p, const ContractSet& s) {
    // best acceptable contract per doctor, then the quota best doctors
    std::map<int, int> best;
    auto better = [&](int a, int b) {
        const Rational &wa = p.weight.at(a), &wb = p.weight.at(b);
        if (wa != wb) return wa > wb;
        return m.contracts[a].id < m.contracts[b].id;
    };
    for (int c : s) {
        auto it = p.weight.find(c);
        if (it == p.weight.end() || it->second <= 0) continue;
        auto [pos, fresh] = best.emplace(m.contracts[c].doctor, c);
        if (!fresh && better(c, pos->second)) pos->second = c;
    }
    std::vector<int> pick;
    for (auto& [d, c] : best) pick.push_back(c);
    std::sort(pick.begin(), pick.end(), better);
    if (static_cast<int>(pick.size()) > p.quota) pick.resize(p.quota);
    return sorted(pick);
}

ContractSet table_choice(const ContractModel& m, const HospitalPreference& p, const ContractSet& s) {
    std::map<int, std::vector<int>> by_doctor;
    for (int c : s) by_doctor[m.contracts[c].doctor].push_back(c);
    std::vector<std::vector<int>> groups;
    for (auto& [d, cs] : by_doctor) groups.push_back(cs);

    std::optional<Rational> best_value;
    ContractSet best;
    std::vector<std::string> best_ids;
    ContractSet cur;
    auto consider = [&]() {
        ContractSet key = sorted(cur);
        Rational v;
        auto it = p.table.find(key);
        if (it != p.table.end()) {
            v = it->second;
        } else if (key.empty()) {
            v = 0;
        } else {
            return;
        }
        auto ids = ids_of(m, key);
        if (!best_value || v > *best_value || (v == *best_value && ids < best_ids)) {
            best_value = v;
            best = key;
            best_ids = ids;
        }
    };
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == groups.size()) return consider();
        rec(i + 1);
        for (int c : groups[i]) {
            cur.push_back(c);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return best;
}

// Choices of h for every subset of its contracts, as bitmasks over `own`.
std::vector<std::uint32_t> choice_masks(const ContractModel& m, int h, const std::vector<int>& own, std::size_t cap) {
    if (own.size() > cap)
        throw ScanCapExceeded("hospital " + m.hospitals[h] + " has " + std::to_string(own.size()) +
                              " contracts, cap " + std::to_string(cap));
    const std::uint32_t full = 1u << own.size();
    std::vector<std::uint32_t> out(full);
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        ContractSet s;
        for (std::size_t i = 0; i < own.size(); ++i)
            if (mask >> i & 1u) s.push_back(own[i]);
        std::uint32_t chosen = 0;
        for (int c : choice_hospital(m, h, s))
            chosen |= 1u << (std::find(own.begin(), own.end(), c) - own.begin());
        out[mask] = chosen;
    }
    return out;
}

ContractSet from_mask(const std::vector<int>& own, std::uint32_t mask) {
    ContractSet s;
    for (std::size_t i = 0; i < own.size(); ++i)
        if (mask >> i & 1u) s.push_back(own[i]);
    return s;
}

}  // namespace

std::optional<int> choice_doctor(const ContractModel& m, int d, const ContractSet& offered) {
    std::optional<int> best;
    for (int c : offered) {
        if (m.contracts[c].doctor != d) continue;
        auto it = m.doctor_utility[d].find(c);
        if (it == m.doctor_utility[d].end() || it->second <= m.doctor_null[d]) continue;
        if (!best) {
            best = c;
            continue;
        }
        const Rational& cur = m.doctor_utility[d].at(*best);
        if (it->second > cur || (it->second == cur && m.contracts[c].id < m.contracts[*best].id)) best = c;
    }
    return best;
}

ContractSet choice_hospital(const ContractModel& m, int h, const ContractSet& offered) {
    const HospitalPreference& p = m.hospital[h];
    ContractSet s = restrict_hospital(m, offered, h);
    switch (p.kind) {
        case HospitalPreference::Kind::Additive: return additive_choice(m, p, s);
        case HospitalPreference::Kind::Table: return table_choice(m, p, s);
        case HospitalPreference::Kind::Choice: {
            auto it = p.choice.find(s);
            if (it == p.choice.end()) return {};
            ContractSet out;
            for (int c : it->second)
                if (std::binary_search(s.begin(), s.end(), c)) out.push_back(c);
            return sorted(out);
        }
    }
    return {};
}

DaContractsResult run_da_contracts(const ContractModel& m) {
    const int nd = static_cast<int>(m.doctors.size());
    DaContractsResult res;
    std::vector<bool> rejected(m.contracts.size(), false), held(m.contracts.size(), false), done(nd, false);
    auto matched = [&](int d) {
        for (int c : m.of_doctor(d))
            if (held[c]) return true;
        return false;
    };
    for (;;) {
        int d = -1;
        for (int k = 0; k < nd && d < 0; ++k)
            if (!done[k] && !matched(k)) d = k;
        if (d < 0) break;
        ContractSet open;
        for (int c : m.of_doctor(d))
            if (!rejected[c]) open.push_back(c);
        std::optional<int> x = choice_doctor(m, d, open);
        if (!x) {
            done[d] = true;
            continue;
        }
        ++res.proposals;
        const int h = m.contracts[*x].hospital;
        ContractSet pool{*x};
        for (int c : m.of_hospital(h))
            if (held[c]) pool.push_back(c);
        pool = sorted(pool);
        ContractSet w = choice_hospital(m, h, pool);
        for (int c : pool) {
            const bool keep = std::binary_search(w.begin(), w.end(), c);
            held[c] = keep;
            if (!keep) rejected[c] = true;
        }
    }
    for (std::size_t c = 0; c < m.contracts.size(); ++c) {
        if (held[c]) res.accepted.push_back(static_cast<int>(c));
        if (rejected[c]) res.rejected.push_back(static_cast<int>(c));
    }
    return res;
}

std::optional<int> find_pairwise_block(const ContractModel& m, const ContractSet& y) {
    for (std::size_t i = 0; i < m.contracts.size(); ++i) {
        const int x = static_cast<int>(i);
        if (std::binary_search(y.begin(), y.end(), x)) continue;
        ContractSet yx = with(y, x);
        if (choice_doctor(m, m.contracts[x].doctor, yx) != x) continue;
        ContractSet w = choice_hospital(m, m.contracts[x].hospital, yx);
        if (std::binary_search(w.begin(), w.end(), x)) return x;
    }
    return std::nullopt;
}

bool individually_rational(const ContractModel& m, const ContractSet& y) {
    for (std::size_t d = 0; d < m.doctors.size(); ++d) {
        ContractSet own;
        for (int c : y)
            if (m.contracts[c].doctor == static_cast<int>(d)) own.push_back(c);
        if (own.size() > 1) return false;
        std::optional<int> pick = choice_doctor(m, static_cast<int>(d), y);
        if (own.empty() != !pick || (pick && *pick != own[0])) return false;
    }
    for (std::size_t h = 0; h < m.hospitals.size(); ++h)
        if (choice_hospital(m, static_cast<int>(h), y) != restrict_hospital(m, y, static_cast<int>(h))) return false;
    return true;
}

std::optional<SubstitutesWitness> check_substitutability(const ContractModel& m, int h, std::size_t cap) {
    const std::vector<int> own = m.of_hospital(h);
    const std::vector<std::uint32_t> ch = choice_masks(m, h, own, cap);
    for (std::uint32_t base = 0; base < ch.size(); ++base)
        for (std::size_t i = 0; i < own.size(); ++i) {
            const std::uint32_t bx = 1u << i;
            if (!(base & bx) || (ch[base] & bx)) continue;
            for (std::size_t j = 0; j < own.size(); ++j) {
                const std::uint32_t by = 1u << j;
                if (base & by) continue;
                if (ch[base | by] & bx) return SubstitutesWitness{from_mask(own, base), own[i], own[j]};
            }
        }
    return std::nullopt;
}

std::optional<IrcWitness> check_irc(const ContractModel& m, int h, std::size_t cap) {
    const std::vector<int> own = m.of_hospital(h);
    const std::vector<std::uint32_t> ch = choice_masks(m, h, own, cap);
    for (std::uint32_t base = 0; base < ch.size(); ++base)
        for (std::size_t i = 0; i < own.size(); ++i) {
            const std::uint32_t bz = 1u << i;
            if (base & bz) continue;
            if (!(ch[base | bz] & bz) && ch[base] != ch[base | bz]) return IrcWitness{from_mask(own, base), own[i]};
        }
    return std::nullopt;
}

HmVerdict check_hm_stability(const ContractModel& m, const ContractSet& y, std::size_t cap) {
    HmVerdict v;
    if (!individually_rational(m, y)) {
        v.stable = false;
        v.individually_rational = false;
        return v;
    }
    for (std::size_t hi = 0; hi < m.hospitals.size(); ++hi) {
        const int h = static_cast<int>(hi);
        const std::vector<int> own = m.of_hospital(h);
        const std::vector<std::uint32_t> ch = choice_masks(m, h, own, cap);
        std::uint32_t ymask = 0;
        for (std::size_t i = 0; i < own.size(); ++i)
            if (std::binary_search(y.begin(), y.end(), own[i])) ymask |= 1u << i;
        for (std::uint32_t x2 = 0; x2 < ch.size(); ++x2) {
            if (x2 == ch[ymask] || ch[ymask | x2] != x2) continue;
            ContractSet pool = y;
            for (int c : from_mask(own, x2)) pool.push_back(c);
            pool = sorted(pool);
            bool wanted = true;
            for (int c : from_mask(own, x2))
                if (choice_doctor(m, m.contracts[c].doctor, pool) != c) {
                    wanted = false;
                    break;
                }
            if (!wanted) continue;
            v.stable = false;
            v.hospital = h;
            v.blocking = from_mask(own, x2);
            return v;
        }
    }
    return v;
}

ContractAudit audit_contracts(const ContractModel& m, const ContractSet& y, std::size_t cap) {
    ContractAudit a;
    for (std::size_t h = 0; h < m.hospitals.size(); ++h) {
        a.substitutes.push_back(check_substitutability(m, static_cast<int>(h), cap));
        a.irc.push_back(check_irc(m, static_cast<int>(h), cap));
    }
    a.pairwise_block = find_pairwise_block(m, y);
    a.hm = check_hm_stability(m, y, cap);
    return a;
}

GridContracts contracts_from_game(const Instance& inst, int k, const std::optional<Rational>& baseline) {
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "grid contracts need an additive separable instance");
    GridContracts out;
    ContractModel& m = out.model;
    for (const Agent& d : inst.doctors) {
        m.doctors.push_back(d.id);
        m.doctor_null.push_back(d.irp);
    }
    m.doctor_utility.resize(inst.doctors.size());
    for (const Agent& h : inst.hospitals) {
        m.hospitals.push_back(h.id);
        HospitalPreference p;
        p.quota = h.quota;
        m.hospital.push_back(p);
    }
    for (const auto& [key, g] : inst.games) {
        auto [d, h] = key;
        const Rational base = baseline ? *baseline : inst.hospitals[h].irp;
        const auto xs = simplex_grid(g.rows(), k), ys = simplex_grid(g.cols(), k);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ys.size(); ++j) {
                const int c = static_cast<int>(m.contracts.size());
                m.contracts.push_back({inst.doctors[d].id + ":" + inst.hospitals[h].id + ":" + std::to_string(i) + ":" +
                                           std::to_string(j),
                                       d, h});
                m.doctor_utility[d][c] = bilinear(xs[i], g.A, ys[j]);
                m.hospital[h].weight[c] = bilinear(xs[i], g.M, ys[j]) - base;
                out.couple.push_back(key);
                out.profile.push_back({xs[i], ys[j], std::nullopt});
            }
    }
    return out;
}

Allocation allocation_from_contracts(const Instance& inst, const GridContracts& g, const ContractSet& y) {
    Allocation a = empty_allocation(inst);
    for (int c : y) {
        auto [d, h] = g.couple[c];
        a.match[d] = h;
        a.profiles[{d, h}] = g.profile[c];
    }
    return a;
}

Instance game_from_contracts(const ContractModel& m) {
    Instance inst;
    inst.kind = ModelKind::AdditiveSeparable;
    const int nd = static_cast<int>(m.doctors.size()), nh = static_cast<int>(m.hospitals.size());
    std::vector<std::vector<int>> xd(nd), yh(nh);
    for (int d = 0; d < nd; ++d) {
        xd[d] = m.of_doctor(d);
        Agent a;
        a.id = m.doctors[d];
        a.irp = m.doctor_null[d];
        for (int c : xd[d]) a.strategies.push_back(m.contracts[c].id);
        if (a.strategies.empty()) a.strategies.push_back("none");
        inst.doctors.push_back(a);
    }
    for (int h = 0; h < nh; ++h) {
        if (m.hospital[h].kind != HospitalPreference::Kind::Additive)
            throw InputError("UnsupportedModel", "hospital " + m.hospitals[h] + " is not additive");
        yh[h] = m.of_hospital(h);
        Agent a;
        a.id = m.hospitals[h];
        a.irp = 0;
        a.quota = m.hospital[h].quota;
        for (int c : yh[h]) a.strategies.push_back(m.contracts[c].id);
        if (a.strategies.empty()) a.strategies.push_back("none");
        inst.hospitals.push_back(a);
    }
    for (int d = 0; d < nd; ++d)
        for (int h = 0; h < nh; ++h) {
            BimatrixGame g;
            g.cls = GameClass::General;
            const std::size_t r = inst.doctors[d].strategies.size(), c = inst.hospitals[h].strategies.size();
            g.A.assign(r, Vec(c, -1));
            g.M.assign(r, Vec(c, -1));
            for (std::size_t s = 0; s < xd[d].size(); ++s)
                for (std::size_t t = 0; t < yh[h].size(); ++t) {
                    const int x = xd[d][s];
                    if (x != yh[h][t]) continue;
                    auto u = m.doctor_utility[d].find(x);
                    auto w = m.hospital[h].weight.find(x);
                    if (u != m.doctor_utility[d].end()) g.A[s][t] = u->second;
                    if (w != m.hospital[h].weight.end()) g.M[s][t] = w->second;
                }
            inst.games[{d, h}] = std::move(g);
        }
    return inst;
}

ContractModel generate_contract_model(const ContractGenConfig& cfg) {
    Rng rng(cfg.seed);
    ContractModel m;
    for (int d = 0; d < cfg.doctors; ++d) m.doctors.push_back("d" + std::to_string(d + 1));
    for (int h = 0; h < cfg.hospitals; ++h) m.hospitals.push_back("h" + std::to_string(h + 1));
    m.doctor_utility.resize(cfg.doctors);
    m.doctor_null.assign(cfg.doctors, 0);
    for (int c = 0; c < cfg.contracts; ++c) {
        const int d = static_cast<int>(uniform(rng, 0, cfg.doctors - 1));
        const int h = static_cast<int>(uniform(rng, 0, cfg.hospitals - 1));
        m.contracts.push_back({"x" + std::to_string(c + 1), d, h});
        // a few unacceptable contracts
        if (uniform(rng, 0, 5) > 0) m.doctor_utility[d][c] = Rational(uniform(rng, -2, 9));
    }
    for (int h = 0; h < cfg.hospitals; ++h) {
        HospitalPreference p;
        const std::vector<int> own = m.of_hospital(h);
        if (uniform(rng, 0, 99) < cfg.table_percent) {
            p.kind = HospitalPreference::Kind::Table;
            for (std::uint32_t mask = 1; mask < (1u << own.size()); ++mask) {
                ContractSet s = from_mask(own, mask);
                std::vector<int> ds;
                for (int c : s) ds.push_back(m.contracts[c].doctor);
                std::sort(ds.begin(), ds.end());
                if (std::adjacent_find(ds.begin(), ds.end()) != ds.end()) continue;
                if (uniform(rng, 0, 3) == 0) continue;
                p.table[s] = Rational(uniform(rng, -3, 12));
            }
        } else {
            p.quota = static_cast<int>(uniform(rng, 1, cfg.max_quota));
            for (int c : own) p.weight[c] = Rational(uniform(rng, -2, 9));
        }
        m.hospital.push_back(p);
    }
    return m;
}

namespace {

int find_id(const std::vector<std::string>& ids, const std::string& id, const char* what) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw InputError("Schema", std::string("unknown ") + what + " '" + id + "'");
    return static_cast<int>(it - ids.begin());
}

ContractSet set_from_json(const nlohmann::json& j, const std::vector<std::string>& cids) {
    ContractSet s;
    for (const auto& c : j) s.push_back(find_id(cids, c.get<std::string>(), "contract"));
    return sorted(s);
}

nlohmann::json ids_json(const ContractModel& m, const ContractSet& s) {
    nlohmann::json a = nlohmann::json::array();
    for (int c : s) a.push_back(m.contracts[c].id);
    return a;
}

}  // namespace

ContractModel load_contract_model(const nlohmann::json& j) {
    try {
        ContractModel m;
        for (const auto& d : j.at("doctors")) m.doctors.push_back(d.at("id").get<std::string>());
        for (const auto& h : j.at("hospitals")) m.hospitals.push_back(h.at("id").get<std::string>());
        std::vector<std::string> cids;
        for (const auto& c : j.at("contracts")) {
            Contract k;
            k.id = c.at("id").get<std::string>();
            if (std::find(cids.begin(), cids.end(), k.id) != cids.end())
                throw InputError("Schema", "duplicate contract id '" + k.id + "'");
            k.doctor = find_id(m.doctors, c.at("doctor").get<std::string>(), "doctor");
            k.hospital = find_id(m.hospitals, c.at("hospital").get<std::string>(), "hospital");
            cids.push_back(k.id);
            m.contracts.push_back(k);
        }
        for (const auto& d : j.at("doctors")) {
            const int di = static_cast<int>(m.doctor_utility.size());
            m.doctor_null.push_back(d.contains("null") ? rational_from_json(d.at("null")) : Rational(0));
            std::map<int, Rational> u;
            for (const auto& e : d.value("utility", nlohmann::json::array())) {
                int c = find_id(cids, e.at("contract").get<std::string>(), "contract");
                if (m.contracts[c].doctor != di)
                    throw InputError("Schema", "doctor " + m.doctors[di] + " rates a contract of another doctor");
                u[c] = rational_from_json(e.at("value"));
            }
            m.doctor_utility.push_back(u);
        }
        for (const auto& hj : j.at("hospitals")) {
            const int hi = static_cast<int>(m.hospital.size());
            HospitalPreference p;
            auto own = [&](int c) {
                if (m.contracts[c].hospital != hi)
                    throw InputError("Schema", "hospital " + m.hospitals[hi] + " lists a contract of another hospital");
            };
            if (hj.contains("table")) {
                p.kind = HospitalPreference::Kind::Table;
                for (const auto& e : hj.at("table")) {
                    ContractSet s = set_from_json(e.at("contracts"), cids);
                    for (int c : s) own(c);
                    p.table[s] = rational_from_json(e.at("value"));
                }
            } else if (hj.contains("choice")) {
                p.kind = HospitalPreference::Kind::Choice;
                for (const auto& e : hj.at("choice")) {
                    ContractSet from = set_from_json(e.at("offered"), cids), pick = set_from_json(e.at("chosen"), cids);
                    for (int c : from) own(c);
                    if (!std::includes(from.begin(), from.end(), pick.begin(), pick.end()))
                        throw InputError("Schema", "choice entry picks contracts outside the offered set");
                    p.choice[from] = pick;
                }
            } else {
                p.kind = HospitalPreference::Kind::Additive;
                p.quota = hj.value("quota", 1);
                if (p.quota < 1) throw InputError("QuotaOutOfRange", "hospital " + m.hospitals[hi] + " quota < 1");
                for (const auto& e : hj.value("weights", nlohmann::json::array())) {
                    int c = find_id(cids, e.at("contract").get<std::string>(), "contract");
                    own(c);
                    p.weight[c] = rational_from_json(e.at("value"));
                }
            }
            m.hospital.push_back(p);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("Schema", std::string("contract model: ") + e.what());
    } catch (const ParseError& e) {
        throw InputError("Schema", std::string("contract model: ") + e.what());
    }
}

nlohmann::json contract_model_to_json(const ContractModel& m) {
    nlohmann::json j;
    j["model"] = "contracts";
    j["contracts"] = nlohmann::json::array();
    for (const Contract& c : m.contracts)
        j["contracts"].push_back({{"id", c.id}, {"doctor", m.doctors[c.doctor]}, {"hospital", m.hospitals[c.hospital]}});
    j["doctors"] = nlohmann::json::array();
    for (std::size_t d = 0; d < m.doctors.size(); ++d) {
        nlohmann::json u = nlohmann::json::array();
        for (const auto& [c, v] : m.doctor_utility[d]) u.push_back({{"contract", m.contracts[c].id}, {"value", to_json(v)}});
        j["doctors"].push_back({{"id", m.doctors[d]}, {"null", to_json(m.doctor_null[d])}, {"utility", u}});
    }
    j["hospitals"] = nlohmann::json::array();
    for (std::size_t h = 0; h < m.hospitals.size(); ++h) {
        const HospitalPreference& p = m.hospital[h];
        nlohmann::json hj{{"id", m.hospitals[h]}};
        switch (p.kind) {
            case HospitalPreference::Kind::Additive: {
                hj["quota"] = p.quota;
                hj["weights"] = nlohmann::json::array();
                for (const auto& [c, v] : p.weight)
                    hj["weights"].push_back({{"contract", m.contracts[c].id}, {"value", to_json(v)}});
                break;
            }
            case HospitalPreference::Kind::Table: {
                hj["table"] = nlohmann::json::array();
                for (const auto& [s, v] : p.table) hj["table"].push_back({{"contracts", ids_json(m, s)}, {"value", to_json(v)}});
                break;
            }
            case HospitalPreference::Kind::Choice: {
                hj["choice"] = nlohmann::json::array();
                for (const auto& [s, c] : p.choice)
                    hj["choice"].push_back({{"offered", ids_json(m, s)}, {"chosen", ids_json(m, c)}});
                break;
            }
        }
        j["hospitals"].push_back(hj);
    }
    return j;
}

nlohmann::json contract_set_to_json(const ContractModel& m, const ContractSet& y) { return ids_json(m, y); }

}  // namespace mg
