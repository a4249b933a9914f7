#include "gersten/literal.hpp"

#include <cctype>

#include "gersten/error.hpp"
#include "json.hpp"

namespace gersten::literal {

using gfield::Elem;
using gfield::FiniteField;
using gfield::Place;
using gfield::RatFunc;
using milnor::FieldRef;
using milnor::MilnorElement;

milnor::FieldRef parse_field(const std::string& text) {
    std::size_t at = 0;
    auto bad = [&](const std::string& why) {
        fail(errc::parse, "field literal '" + text + "': " + why);
    };
    if (at >= text.size() || text[at] != 'F') bad("expected F<q>");
    ++at;
    std::uint64_t q = 0;
    std::size_t digits = 0;
    while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) {
        q = q * 10 + static_cast<std::uint64_t>(text[at] - '0');
        ++at;
        ++digits;
    }
    if (!digits) bad("expected the field size after F");
    auto fac = gfield::factor_u64(q);
    if (q < 2 || fac.size() != 1) bad(std::to_string(q) + " is not a prime power");
    FiniteField base = gfield::canonical_field(fac[0].first, fac[0].second);
    if (at == text.size()) return milnor::finite_field_ref(base);
    if (text[at] != '(') bad("unexpected trailing characters");
    ++at;
    std::string var;
    while (at < text.size() && (std::isalnum(static_cast<unsigned char>(text[at])) || text[at] == '_'))
        var += text[at++];
    if (var.empty() || at >= text.size() || text[at] != ')' || at + 1 != text.size())
        bad("expected a variable name in parentheses");
    if (var == "a" && base.e() >= 2) bad("the name 'a' is reserved for the coefficient generator");
    return milnor::function_field_ref(base, var);
}

namespace {

struct ElementParser {
    const FieldRef& field;
    const std::string& text;
    std::size_t at = 0;

    [[noreturn]] void bad(const std::string& why) const {
        fail(errc::parse, "element '" + text + "' at offset " + std::to_string(at) + ": " + why);
    }

    void skip_ws() {
        while (at < text.size() && std::isspace(static_cast<unsigned char>(text[at]))) ++at;
    }

    bool eat(char c) {
        skip_ws();
        if (at < text.size() && text[at] == c) {
            ++at;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return at < text.size() ? text[at] : '\0';
    }

    RatFunc parse() {
        RatFunc r = expr();
        skip_ws();
        if (at != text.size()) bad("trailing characters");
        return r;
    }

    RatFunc expr() {
        RatFunc r = term();
        for (;;) {
            if (eat('+'))
                r = gfield::rat_add(field.base, r, term());
            else if (eat('-'))
                r = gfield::rat_sub(field.base, r, term());
            else
                return r;
        }
    }

    RatFunc term() {
        RatFunc r = factor();
        for (;;) {
            if (eat('*')) {
                r = gfield::rat_mul(field.base, r, factor());
            } else if (eat('/')) {
                RatFunc d = factor();
                if (d.zero()) bad("division by zero");
                r = gfield::rat_div(field.base, r, d);
            } else {
                return r;
            }
        }
    }

    RatFunc factor() {
        if (eat('-')) return gfield::rat_neg(field.base, factor());
        RatFunc base = atom();
        if (eat('^')) {
            bool neg = eat('-');
            skip_ws();
            if (at >= text.size() || !std::isdigit(static_cast<unsigned char>(text[at])))
                bad("expected an exponent");
            std::int64_t k = 0;
            while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at])))
                k = k * 10 + (text[at++] - '0');
            if (neg && base.zero()) bad("negative power of zero");
            base = gfield::rat_pow(field.base, base, neg ? -k : k);
        }
        return base;
    }

    RatFunc atom() {
        skip_ws();
        if (at >= text.size()) bad("unexpected end of input");
        char c = text[at];
        if (c == '(') {
            ++at;
            RatFunc r = expr();
            if (!eat(')')) bad("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t n = 0;
            while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at])))
                n = n * 10 + (text[at++] - '0');
            return gfield::rat_from_poly(gfield::poly_constant(field.base.from_int(n)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (at < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[at])) || text[at] == '_'))
                name += text[at++];
            if (field.function_field && name == field.var)
                return gfield::rat_from_poly(gfield::poly_x(field.base));
            if (name == "a" && field.base.e() >= 2)
                return gfield::rat_from_poly(
                    gfield::poly_constant(static_cast<Elem>(field.base.p())));
            bad("unknown name '" + name + "'");
        }
        bad("unexpected character");
    }
};

}  // namespace

RatFunc parse_element(const FieldRef& field, const std::string& text) {
    ElementParser p{field, text};
    RatFunc r = p.parse();
    if (!field.function_field && !gfield::rat_is_constant(r))
        fail(errc::parse, "element of a finite field must be constant: " + text);
    return r;
}

namespace {

// split the body of {...} on top-level commas
std::vector<std::string> split_top(const std::string& body, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

milnor::Symbol parse_symbol(const FieldRef& field, const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '{' || t.back() != '}')
        fail(errc::parse, "symbol literal must be braced: " + text);
    std::string body = t.substr(1, t.size() - 2);
    auto field_split = split_top(body, ';');
    FieldRef f = field;
    if (field_split.size() == 2)
        f = parse_field(trim(field_split[1]));
    else if (field_split.size() > 2)
        fail(errc::parse, "too many ';' in symbol literal");
    milnor::Symbol s{f, {}};
    std::string entries = trim(field_split[0]);
    if (!entries.empty())
        for (const std::string& part : split_top(entries, ','))
            s.entries.push_back(parse_element(f, trim(part)));
    return s;
}

milnor::Symbol parse_symbol_with_inline_field(const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '{' || t.back() != '}')
        fail(errc::parse, "symbol literal must be braced: " + text);
    auto field_split = split_top(t.substr(1, t.size() - 2), ';');
    if (field_split.size() != 2)
        fail(errc::parse, "symbol literal needs an inline field: {entries; F5(t)}");
    return parse_symbol(parse_field(trim(field_split[1])), text);
}

Place parse_place(const FiniteField& base, const std::string& text) {
    std::string t = trim(text);
    if (t == "inf" || t == "infty" || t == "infinity") return gfield::infinite_place(base);
    FieldRef f = milnor::function_field_ref(base);
    RatFunc r = parse_element(f, t);
    if (r.den.degree() != 0 || r.num.degree() < 1)
        fail(errc::parse, "a finite place is a monic irreducible polynomial: " + text);
    gfield::Poly pi = gfield::poly_monic(base, r.num);
    if (!gfield::is_irreducible(base, pi))
        fail(errc::parse, "polynomial is not irreducible: " + text);
    return gfield::finite_place(base, pi);
}

namespace {

nlohmann::json element_json(const MilnorElement& x) {
    nlohmann::json j;
    j["field"] = milnor::field_name(x.field);
    j["degree"] = x.degree;
    if (x.degree == 0) {
        j["constant"] = x.z.get_str();
        return j;
    }
    const FiniteField& F = x.field.base;
    auto unit_string = [](const FiniteField& K, std::uint64_t u) {
        return gfield::print_elem(K, K.pow(K.generator(), mpz_class(static_cast<unsigned long>(u))),
                                  K.e() >= 2 ? "a" : "t");
    };
    if (!x.field.function_field) {
        if (x.degree == 1) j["constant"] = unit_string(F, x.u);
        return j;
    }
    if (x.degree == 1) j["constant"] = unit_string(F, x.u);
    auto res = nlohmann::json::array();
    for (const auto& [k, e] : x.val_res) {
        Place v = gfield::place_from_key(F, k);
        res.push_back({{"place", gfield::print_place(v, x.field.var)}, {"value", e.get_str()}});
    }
    for (const auto& [k, u] : x.unit_res) {
        Place v = gfield::place_from_key(F, k);
        FiniteField K = gfield::residue_field(v);
        res.push_back({{"place", gfield::print_place(v, x.field.var)}, {"value", unit_string(K, u)}});
    }
    j["residues"] = res;
    return j;
}

}  // namespace

std::string element_to_json(const MilnorElement& x) { return element_json(x).dump(); }

std::string chain_to_json(const cyclecx::CycleChain& c, const std::string& scheme_name) {
    nlohmann::json j;
    j["scheme"] = scheme_name;
    j["codim"] = c.p;
    j["grading"] = c.i;
    auto comps = nlohmann::json::array();
    for (const auto& [id, x] : c.components)
        comps.push_back({{"point", id}, {"element", element_json(x)}});
    j["components"] = comps;
    return j.dump();
}

}  // namespace gersten::literal
