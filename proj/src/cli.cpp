#include "gersten/cli.hpp"

#include <cstdlib>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "gersten/cyclecx.hpp"
#include "gersten/error.hpp"
#include "gersten/literal.hpp"
#include "gersten/spectra.hpp"
#include "json.hpp"

namespace gersten::cli {

namespace {

using gfield::Elem;
using gfield::FiniteField;
using gfield::Place;
using milnor::FieldRef;
using milnor::MilnorElement;

FiniteField field_from_q(std::uint64_t q) {
    auto fac = gfield::factor_u64(q);
    if (q < 2 || fac.size() != 1) fail(errc::parse, std::to_string(q) + " is not a prime power");
    return gfield::canonical_field(fac[0].first, fac[0].second);
}

std::shared_ptr<const schememod::SchemeDescription> scheme_from_name(const std::string& name,
                                                                     const FiniteField& base) {
    if (name == "P1")
        return std::make_shared<schememod::SchemeDescription>(schememod::builtin_proj_line(base));
    if (name == "A1")
        return std::make_shared<schememod::SchemeDescription>(schememod::builtin_affine_line(base));
    if (name == "point")
        return std::make_shared<schememod::SchemeDescription>(schememod::builtin_point(base));
    fail(errc::unsupported_scheme, "scheme must be one of point, A1, P1");
}

cyclemod::CycleModuleInstance instance_for(unsigned modl) {
    return modl ? cyclemod::km_mod_instance(modl) : cyclemod::km_instance();
}

std::string residue_text(const MilnorElement& r) {
    std::ostringstream os;
    if (r.degree == 0) {
        os << r.z << " in Z";
        return os.str();
    }
    const FiniteField& K = r.field.base;
    os << gfield::print_elem(K, K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r.u))),
                             K.e() >= 2 ? "a" : "t")
       << " in F" << K.q() << "^x";
    return os.str();
}

schememod::LinearForm parse_linear_form(const FiniteField& base, const std::string& text) {
    schememod::LinearForm lf;
    std::size_t at = 0;
    auto bad = [&](const std::string& why) {
        fail(errc::parse, "linear form '" + text + "': " + why);
    };
    bool any = false;
    int sign = 1;
    while (at < text.size()) {
        char c = text[at];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++at;
            continue;
        }
        if (c == '+') {
            sign = 1;
            ++at;
            continue;
        }
        if (c == '-') {
            sign = -1;
            ++at;
            continue;
        }
        std::int64_t coeff = 1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            coeff = 0;
            while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at])))
                coeff = coeff * 10 + (text[at++] - '0');
            if (at < text.size() && text[at] == '*') ++at;
        }
        if (at >= text.size()) bad("expected a variable");
        char v = text[at++];
        int idx = v == 'x' ? 0 : v == 'y' ? 1 : v == 'z' ? 2 : -1;
        if (idx < 0) bad("variables are x, y, z");
        lf.a[static_cast<std::size_t>(idx)] =
            base.add(lf.a[static_cast<std::size_t>(idx)], base.from_int(sign * coeff));
        any = true;
        sign = 1;
    }
    if (!any) bad("empty form");
    return lf;
}

int emit_report(const cyclemod::Report& rep, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << rep.to_json() << "\n";
    } else {
        for (const auto& e : rep.entries) {
            out << e.check << ": " << e.samples << " samples, "
                << (e.failures.empty() ? "ok" : std::to_string(e.failures.size()) + " failures")
                << "\n";
            for (const auto& f : e.failures) out << "  witness: " << f << "\n";
        }
    }
    return rep.ok() ? 0 : 1;
}

int run_symbol(const FieldRef& field, const std::string& symbol_text, unsigned modl,
               const std::string& format, std::ostream& out) {
    auto phi = instance_for(modl);
    milnor::Symbol s = literal::parse_symbol(field, symbol_text);
    MilnorElement x = cyclemod::reduce_element(phi, milnor::normalize(s));
    if (format == "json")
        out << literal::element_to_json(x) << "\n";
    else
        out << milnor::print_element(x) << "\n";
    return 0;
}

int run_residue(const FieldRef& field, const std::string& place_text,
                const std::string& symbol_text, const std::string& format, std::ostream& out) {
    if (!field.function_field) fail(errc::parse, "--field must be a function field");
    Place v = literal::parse_place(field.base, place_text);
    milnor::Symbol s = literal::parse_symbol(field, symbol_text);
    MilnorElement r = milnor::residue_of_symbol(v, s);
    if (format == "json")
        out << literal::element_to_json(r) << "\n";
    else
        out << residue_text(r) << "\n";
    return 0;
}

int run_divisor(const FieldRef& field, const std::string& scheme_name,
                const std::string& symbol_text, unsigned modl, const std::string& format,
                std::ostream& out) {
    if (!field.function_field) fail(errc::parse, "--field must be a function field");
    auto X = scheme_from_name(scheme_name, field.base);
    auto phi = instance_for(modl);
    milnor::Symbol s = literal::parse_symbol(field, symbol_text);
    auto c = cyclecx::zero_chain(X, phi, 0, static_cast<int>(s.entries.size()));
    cyclecx::set_component(c, schememod::generic_point_id(), milnor::normalize(s));
    auto d = cyclecx::differential(c);
    if (format == "json") {
        out << literal::chain_to_json(d, X->name()) << "\n";
    } else {
        if (d.components.empty()) out << "0\n";
        for (const auto& [id, val] : d.components)
            out << id << ": " << residue_text(val) << "\n";
    }
    return 0;
}

int run_chow(const std::string& scheme_name, std::uint64_t q, int p, int i, unsigned modl,
             const std::string& format, std::ostream& out) {
    FiniteField base = field_from_q(q);
    auto X = scheme_from_name(scheme_name, base);
    auto res = cyclecx::chow(X, instance_for(modl), p, i);
    if (format == "json") {
        nlohmann::json j;
        j["p"] = p;
        j["i"] = i;
        j["group"] = res.group.to_string();
        j["rank"] = res.group.rank();
        auto tor = nlohmann::json::array();
        for (const auto& t : res.group.torsion()) tor.push_back(t.get_str());
        j["torsion"] = tor;
        j["exact"] = res.exact;
        j["note"] = res.note;
        out << j.dump() << "\n";
    } else {
        out << res.group.to_string();
        if (!res.note.empty()) out << " (" << res.note << ")";
        out << "\n";
    }
    return 0;
}

int run_unramified(const std::string& scheme_name, std::uint64_t q, int i, unsigned modl,
                   const std::string& format, std::ostream& out) {
    FiniteField base = field_from_q(q);
    auto X = scheme_from_name(scheme_name, base);
    auto g = cyclecx::unramified(*X, instance_for(modl), i);
    if (format == "json") {
        nlohmann::json j;
        j["i"] = i;
        j["group"] = g.to_string();
        out << j.dump() << "\n";
    } else {
        out << g.to_string() << "\n";
    }
    return 0;
}

int run_axioms(unsigned samples, std::uint64_t seed, unsigned modl, const std::string& format,
               std::ostream& out) {
    auto rep = cyclemod::check_premodule_coherences(instance_for(modl), samples, seed);
    return emit_report(rep, format, out);
}

int run_square_zero(std::uint64_t q, const std::string& lines, unsigned samples,
                    std::uint64_t seed, unsigned max_lines, const std::string& format,
                    std::ostream& out) {
    FiniteField base = field_from_q(q);
    if (!lines.empty()) {
        std::vector<schememod::LinearForm> forms;
        std::stringstream ss(lines);
        std::string part;
        while (std::getline(ss, part, ',')) forms.push_back(parse_linear_form(base, part));
        auto X = std::make_shared<schememod::SchemeDescription>(
            schememod::builtin_line_config(base, forms));
        auto rep = cyclecx::check_square_zero(X, samples ? samples : 20, seed);
        return emit_report(rep, format, out);
    }
    // random configurations
    std::mt19937_64 rng(seed);
    cyclemod::Report total;
    cyclemod::CheckEntry entry{"square_zero_random_configs", samples, {}};
    auto normalized = [&](const schememod::LinearForm& lf) {
        auto v = lf.a;
        for (auto& c : v) {
            if (c == 0) continue;
            Elem inv = base.inv(c);
            for (auto& x : v) x = base.mul(x, inv);
            break;
        }
        return v;
    };
    for (unsigned s = 0; s < samples; ++s) {
        std::vector<schememod::LinearForm> forms;
        unsigned want = 2 + rng() % (max_lines - 1);
        while (forms.size() < want) {
            schememod::LinearForm lf;
            for (auto& c : lf.a) c = rng() % base.q();
            if (lf.a == std::array<Elem, 3>{0, 0, 0}) continue;
            bool repeated = false;
            for (const auto& g : forms)
                if (normalized(g) == normalized(lf)) repeated = true;
            if (!repeated) forms.push_back(lf);
        }
        auto X = std::make_shared<schememod::SchemeDescription>(
            schememod::builtin_line_config(base, forms));
        auto rep = cyclecx::check_square_zero(X, 5, rng());
        for (auto& e : rep.entries)
            for (auto& f : e.failures)
                entry.failures.push_back("config " + std::to_string(s) + ": " + f);
    }
    total.entries.push_back(std::move(entry));
    return emit_report(total, format, out);
}

int run_ss(const std::string& scheme_name, std::uint64_t q, int n, unsigned bound,
           const std::string& support_text, const std::string& format, std::ostream& out) {
    FiniteField base = field_from_q(q);
    auto X = scheme_from_name(scheme_name, base);
    std::vector<gfield::Poly> hints;
    if (!support_text.empty()) {
        FieldRef ft = milnor::function_field_ref(base);
        std::stringstream ss(support_text);
        std::string part;
        while (std::getline(ss, part, ',')) {
            auto r = literal::parse_element(ft, part);
            if (!r.num.zero()) hints.push_back(r.num);
            if (r.den.degree() > 0) hints.push_back(r.den);
        }
    }
    auto support = spectra::support_places(base, bound, hints);
    auto res = spectra::assemble_coniveau(X, spectra::Realization::motivic, n, support);
    if (format == "json") {
        nlohmann::json j;
        auto pages = nlohmann::json::array();
        for (const auto& pg : res.ss.pages)
            pages.push_back(nlohmann::json::parse(spectra::page_to_json(pg)));
        j["weight"] = n;
        j["scheme"] = X->name();
        j["stable_r"] = res.ss.stable_r;
        j["pages"] = pages;
        j["diagonal"] = res.exact_diagonal.to_string();
        auto filt = nlohmann::json::array();
        auto reportage = spectra::coniveau_filtration_report(res.ss, "H");
        for (const auto& [deg, steps] : reportage.steps) {
            nlohmann::json f;
            f["total_degree"] = deg;
            auto arr = nlohmann::json::array();
            for (const auto& [name, grp] : steps)
                arr.push_back({{"name", name}, {"group", grp.to_string()}});
            f["steps"] = arr;
            filt.push_back(f);
        }
        j["filtration"] = filt;
        out << j.dump() << "\n";
    } else {
        for (const auto& pg : res.ss.pages) {
            out << "E_" << pg.r << ":";
            bool any = false;
            for (const auto& [i, grp] : pg.entries) {
                if (grp.trivial()) continue;
                out << "  (" << i.p << "," << i.q << ") " << grp.to_string();
                any = true;
            }
            if (!any) out << "  all zero";
            out << "\n";
        }
        out << "stable from r = " << res.ss.stable_r << "\n";
        out << "exact E_2 diagonal: " << res.exact_diagonal.to_string();
        if (!res.exact_diagonal_note.empty()) out << " (" << res.exact_diagonal_note << ")";
        out << "\n";
        auto reportage = spectra::coniveau_filtration_report(res.ss, "H");
        for (const auto& [deg, steps] : reportage.steps)
            for (const auto& [name, grp] : steps)
                out << name << " = " << grp.to_string() << "\n";
    }
    return 0;
}

int run_reciprocity(std::uint64_t q, const std::string& symbol_text, const std::string& format,
                    std::ostream& out) {
    FiniteField base = field_from_q(q);
    FieldRef ft = milnor::function_field_ref(base);
    milnor::Symbol s = literal::parse_symbol(ft, symbol_text);
    if (s.entries.size() != 2) fail(errc::parse, "reciprocity takes a K_2 symbol {a, b}");

    std::map<gfield::PlaceKey, Place> places;
    for (const auto& entry : s.entries)
        for (const Place& v : milnor::support_places(milnor::normalize(milnor::Symbol{ft, {entry}})))
            places.emplace(gfield::place_key(v), v);
    places.emplace(gfield::PlaceKey{}, gfield::infinite_place(base));

    std::uint64_t acc = 0;
    nlohmann::json contributions = nlohmann::json::array();
    for (auto& [k, v] : places) {
        MilnorElement r = milnor::residue_of_symbol(v, s);
        FiniteField K = gfield::residue_field(v);
        Elem val = K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r.u)));
        Elem nm = gfield::norm_along(gfield::canonical_hom(base, K), val);
        acc = (acc + base.dlog(nm)) % (base.q() - 1);
        contributions.push_back({{"place", gfield::print_place(v, "t")},
                                 {"residue", gfield::print_elem(K, val, K.e() >= 2 ? "a" : "t")},
                                 {"norm", gfield::print_elem(base, nm, "t")}});
    }
    bool pass = acc == 0;
    Elem prod = base.pow(base.generator(), mpz_class(static_cast<unsigned long>(acc)));
    if (format == "json") {
        nlohmann::json j;
        j["contributions"] = contributions;
        j["product_of_norms"] = gfield::print_elem(base, prod, "t");
        j["pass"] = pass;
        out << j.dump() << "\n";
    } else {
        out << "product of norms = " << gfield::print_elem(base, prod, "t") << "; "
            << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact Gersten-complex and coniveau spectral sequence calculator"};
    app.require_subcommand(1);

    std::string field_text = "F5(t)", place_text, symbol_text, scheme_name = "P1";
    std::string format = "text", lines_text, support_text;
    std::uint64_t q = 3, seed = 0;
    unsigned modl = 0, samples = 0, max_lines = 5;
    int p = 1, i = 1, n = 1;
    unsigned bound = 2;
    if (const char* env = std::getenv("GERSTEN_SUPPORT_BOUND")) {
        char* endp = nullptr;
        unsigned long v = std::strtoul(env, &endp, 10);
        if (endp && *endp == '\0' && v > 0 && v <= 6) bound = static_cast<unsigned>(v);
    }

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
    };

    auto* sym = app.add_subcommand("symbol", "normal form of a Milnor symbol");
    sym->add_option("--field", field_text)->required();
    sym->add_option("--symbol", symbol_text)->required();
    sym->add_option("--modl", modl);
    add_format(sym);

    auto* res = app.add_subcommand("residue", "tame symbol of a symbol at a place");
    res->add_option("--field", field_text)->required();
    res->add_option("--place", place_text)->required();
    res->add_option("--symbol", symbol_text)->required();
    add_format(res);

    auto* divi = app.add_subcommand("divisor", "differential of a generic chain on a curve");
    divi->add_option("--field", field_text)->required();
    divi->add_option("--scheme", scheme_name)->check(CLI::IsMember({"A1", "P1"}));
    divi->add_option("--symbol", symbol_text)->required();
    divi->add_option("--modl", modl);
    add_format(divi);

    auto* ch = app.add_subcommand("chow", "Chow group with coefficients");
    ch->add_option("--scheme", scheme_name)->check(CLI::IsMember({"point", "A1", "P1"}));
    ch->add_option("--q", q)->required();
    ch->add_option("--p", p);
    ch->add_option("--i", i);
    ch->add_option("--modl", modl);
    add_format(ch);

    auto* unr = app.add_subcommand("unramified", "unramified cohomology A^0");
    unr->add_option("--scheme", scheme_name)->check(CLI::IsMember({"point", "P1"}));
    unr->add_option("--q", q)->required();
    unr->add_option("--i", i);
    unr->add_option("--modl", modl);
    add_format(unr);

    auto* ax = app.add_subcommand("axioms", "randomized premodule coherence suite");
    ax->add_option("--samples", samples)->required();
    ax->add_option("--seed", seed)->required();
    ax->add_option("--modl", modl);
    add_format(ax);

    auto* sq = app.add_subcommand("square-zero", "d o d = 0 on line configurations");
    sq->add_option("--q", q)->required();
    sq->add_option("--lines", lines_text, "comma-separated linear forms in x,y,z");
    sq->add_option("--samples", samples);
    sq->add_option("--seed", seed);
    sq->add_option("--max-lines", max_lines)->check(CLI::Range(2u, 8u));
    add_format(sq);

    auto* ss = app.add_subcommand("ss", "coniveau spectral sequence pages");
    ss->add_option("--scheme", scheme_name)->check(CLI::IsMember({"point", "A1", "P1"}));
    ss->add_option("--q", q)->required();
    ss->add_option("--n", n, "motivic weight");
    ss->add_option("--bound", bound, "place degree bound for the support")
        ->check(CLI::Range(1u, 4u));
    ss->add_option("--support", support_text, "comma-separated support polynomials");
    add_format(ss);

    auto* rec = app.add_subcommand("reciprocity", "Weil reciprocity for a K_2 symbol");
    rec->add_option("--q", q)->required();
    rec->add_option("--symbol", symbol_text)->required();
    add_format(rec);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sym->parsed())
            return run_symbol(literal::parse_field(field_text), symbol_text, modl, format, out);
        if (res->parsed())
            return run_residue(literal::parse_field(field_text), place_text, symbol_text, format,
                               out);
        if (divi->parsed())
            return run_divisor(literal::parse_field(field_text), scheme_name, symbol_text, modl,
                               format, out);
        if (ch->parsed()) return run_chow(scheme_name, q, p, i, modl, format, out);
        if (unr->parsed()) return run_unramified(scheme_name, q, i, modl, format, out);
        if (ax->parsed()) return run_axioms(samples, seed, modl, format, out);
        if (sq->parsed()) {
            if (lines_text.empty() && samples == 0)
                fail(errc::parse, "square-zero needs --lines or --samples with --seed");
            return run_square_zero(q, lines_text, samples, seed, max_lines, format, out);
        }
        if (ss->parsed()) return run_ss(scheme_name, q, n, bound, support_text, format, out);
        if (rec->parsed()) return run_reciprocity(q, symbol_text, format, out);
    } catch (const error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "no subcommand\n";
    return 2;
}

}  // namespace gersten::cli
