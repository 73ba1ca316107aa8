#include "stokeslab/state_spec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "stokeslab/error.hpp"
#include "stokeslab/serialization.hpp"
#include "stokeslab/states.hpp"

namespace stokeslab {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

bool is_identifier(const std::string &s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    for (char ch : s) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) {
            return false;
        }
    }
    return true;
}

SpecCall parse_call(std::string_view text) {
    const std::string term = trim(text);
    const auto open = term.find('(');
    if (open == std::string::npos || term.back() != ')') {
        throw SpecError("expected name(key=value,...)", term);
    }
    SpecCall call;
    call.name = trim(std::string_view(term).substr(0, open));
    if (!is_identifier(call.name)) {
        throw SpecError("invalid name", call.name);
    }
    const std::string body = term.substr(open + 1, term.size() - open - 2);
    if (trim(body).empty()) {
        return call;
    }
    std::size_t start = 0;
    while (start <= body.size()) {
        auto comma = body.find(',', start);
        if (comma == std::string::npos) {
            comma = body.size();
        }
        const std::string arg = trim(std::string_view(body).substr(start, comma - start));
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            throw SpecError("expected key=value", arg.empty() ? term : arg);
        }
        std::string key = trim(std::string_view(arg).substr(0, eq));
        std::string value = trim(std::string_view(arg).substr(eq + 1));
        if (!is_identifier(key)) {
            throw SpecError("invalid key", key);
        }
        if (value.empty()) {
            throw SpecError("empty value", arg);
        }
        if (call.find(key)) {
            throw SpecError("duplicate key", key);
        }
        call.args.emplace_back(std::move(key), std::move(value));
        start = comma + 1;
    }
    return call;
}

double to_number(const SpecCall &call, const std::string &key, const std::string &value) {
    double out = 0.0;
    const char *first = value.data();
    const char *last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
        throw SpecError("value of " + call.name + "." + key + " is not a number", value);
    }
    return out;
}

class ArgReader {
   public:
    explicit ArgReader(const SpecCall &call) : call_(call) {
    }

    double number(const std::string &key, std::optional<double> fallback = std::nullopt) {
        used_.insert(key);
        const auto v = call_.find(key);
        if (!v) {
            if (fallback) {
                return *fallback;
            }
            throw SpecError("missing argument '" + key + "'", call_.to_string());
        }
        return to_number(call_, key, *v);
    }

    long long integer(const std::string &key, std::optional<long long> fallback = std::nullopt) {
        used_.insert(key);
        const auto v = call_.find(key);
        if (!v) {
            if (fallback) {
                return *fallback;
            }
            throw SpecError("missing argument '" + key + "'", call_.to_string());
        }
        const double x = to_number(call_, key, *v);
        if (x != std::floor(x) || std::abs(x) > 9.0e15) {
            throw SpecError("value of " + call_.name + "." + key + " must be an integer", *v);
        }
        return static_cast<long long>(x);
    }

    std::string text(const std::string &key) {
        used_.insert(key);
        const auto v = call_.find(key);
        if (!v) {
            throw SpecError("missing argument '" + key + "'", call_.to_string());
        }
        return *v;
    }

    // Rejects arguments the builder did not consume.
    void finish() const {
        for (const auto &[key, value] : call_.args) {
            if (!used_.contains(key)) {
                throw SpecError("unknown argument for " + call_.name + "()", key);
            }
        }
    }

   private:
    const SpecCall &call_;
    std::set<std::string> used_;
};

const std::map<std::string, std::set<std::string>, std::less<>> kFamilies{
    {"vacuum", {}},
    {"singlet", {"n"}},
    {"bsv", {"gain"}},
    {"sep", {"seed", "terms"}},
    {"fock", {"ah", "av", "bh", "bv"}},
    {"load", {"path"}},
};
const std::map<std::string, std::set<std::string>, std::less<>> kModifiers{
    {"noise", {"p"}},
    {"loss", {"etaA", "etaB"}},
};

// Names and keys are checked up front so the first error points at the typo.
void check_keys(const SpecCall &call, const std::map<std::string, std::set<std::string>, std::less<>> &table,
                const char *what) {
    const auto entry = table.find(call.name);
    if (entry == table.end()) {
        throw SpecError(std::string("unknown ") + what, call.name);
    }
    for (const auto &[key, value] : call.args) {
        if (!entry->second.contains(key)) {
            throw SpecError("unknown argument for " + call.name + "()", key);
        }
    }
}

SpecCall *find_call(StateSpec &spec, std::string_view name) {
    if (spec.family.name == name) {
        return &spec.family;
    }
    for (auto &m : spec.modifiers) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

std::pair<std::string, std::string> split_dotted(std::string_view dotted) {
    const auto dot = dotted.find('.');
    if (dot == std::string_view::npos) {
        throw SpecError("parameter must look like call.key", std::string(dotted));
    }
    return {std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

QuantumState load_state(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open state file", path);
    }
    return read_state_csv(in);
}

int load_truncation(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open state file", path);
    }
    return read_state_csv(in).truncation().n_max_per_beam;
}

}  // namespace

std::optional<std::string> SpecCall::find(std::string_view key) const {
    for (const auto &[k, v] : args) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string SpecCall::to_string() const {
    std::string out = name + "(";
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (k > 0) {
            out += ",";
        }
        out += args[k].first + "=" + args[k].second;
    }
    return out + ")";
}

std::string StateSpec::to_string() const {
    std::string out = family.to_string();
    for (const auto &m : modifiers) {
        out += "+" + m.to_string();
    }
    return out;
}

StateSpec parse_state_spec(std::string_view text) {
    std::vector<std::string> terms;
    int depth = 0;
    std::string current;
    for (char ch : text) {
        if (ch == '(') {
            ++depth;
        } else if (ch == ')') {
            --depth;
            if (depth < 0) {
                throw SpecError("unbalanced ')'", std::string(text));
            }
        }
        if (ch == '+' && depth == 0) {
            terms.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    if (depth != 0) {
        throw SpecError("unbalanced '('", std::string(text));
    }
    terms.push_back(current);
    if (trim(terms.front()).empty()) {
        throw SpecError("empty state spec", std::string(text));
    }
    StateSpec spec;
    spec.family = parse_call(terms.front());
    check_keys(spec.family, kFamilies, "state family");
    for (std::size_t k = 1; k < terms.size(); ++k) {
        if (trim(terms[k]).empty()) {
            throw SpecError("empty modifier", std::string(text));
        }
        spec.modifiers.push_back(parse_call(terms[k]));
        check_keys(spec.modifiers.back(), kModifiers, "modifier");
    }
    return spec;
}

void set_spec_parameter(StateSpec &spec, std::string_view dotted_name, double value) {
    const auto [name, key] = split_dotted(dotted_name);
    SpecCall *call = find_call(spec, name);
    if (call == nullptr) {
        throw SpecError("state spec has no '" + name + "(...)' term", std::string(dotted_name));
    }
    for (auto &[k, v] : call->args) {
        if (k == key) {
            v = format_double(value);
            return;
        }
    }
    call->args.emplace_back(key, format_double(value));
}

std::optional<double> spec_parameter(const StateSpec &spec, std::string_view dotted_name) {
    const auto [name, key] = split_dotted(dotted_name);
    StateSpec copy = spec;
    const SpecCall *call = find_call(copy, name);
    if (call == nullptr) {
        return std::nullopt;
    }
    const auto v = call->find(key);
    if (!v) {
        return std::nullopt;
    }
    return to_number(*call, key, *v);
}

Truncation suggested_truncation(const StateSpec &spec, int fallback) {
    ArgReader args(spec.family);
    const std::string &name = spec.family.name;
    if (name == "bsv") {
        return {bsv_min_truncation(args.number("gain"))};
    }
    if (name == "singlet") {
        return {static_cast<int>(std::max<long long>(args.integer("n"), 1))};
    }
    if (name == "fock") {
        const auto a = args.integer("ah", 0) + args.integer("av", 0);
        const auto b = args.integer("bh", 0) + args.integer("bv", 0);
        return {static_cast<int>(std::max({a, b, 1LL}))};
    }
    if (name == "load") {
        return {load_truncation(args.text("path"))};
    }
    return {fallback};
}

QuantumState build_state(const StateSpec &spec, const Truncation &truncation) {
    const SpecCall &family = spec.family;
    ArgReader args(family);
    auto state = [&]() -> QuantumState {
        if (family.name == "vacuum") {
            return vacuum(truncation);
        }
        if (family.name == "singlet") {
            const auto n = args.integer("n");
            if (n < 0 || n > truncation.n_max_per_beam) {
                throw SpecError("singlet n must lie in [0, n_max]", family.to_string());
            }
            return singlet_sector(static_cast<int>(n), truncation);
        }
        if (family.name == "bsv") {
            const double gain = args.number("gain");
            if (gain < 0.0) {
                throw SpecError("bsv gain must be non-negative", family.to_string());
            }
            return bsv({gain, truncation});
        }
        if (family.name == "sep") {
            const auto seed = args.integer("seed");
            const auto terms = args.integer("terms", 1);
            if (seed < 0 || terms < 1) {
                throw SpecError("sep needs seed >= 0 and terms >= 1", family.to_string());
            }
            return random_separable(static_cast<std::uint64_t>(seed), static_cast<int>(terms), truncation);
        }
        if (family.name == "fock") {
            const OccupationState occ{static_cast<int>(args.integer("ah", 0)), static_cast<int>(args.integer("av", 0)),
                                      static_cast<int>(args.integer("bh", 0)), static_cast<int>(args.integer("bv", 0))};
            if (!occ.fits(truncation)) {
                throw SpecError("fock state outside the truncation", family.to_string());
            }
            return fock_state(truncation, occ);
        }
        if (family.name == "load") {
            QuantumState loaded = load_state(args.text("path"));
            if (!(loaded.truncation() == truncation)) {
                throw SpecError("loaded state has n_max " + std::to_string(loaded.truncation().n_max_per_beam),
                                family.to_string());
            }
            return loaded;
        }
        throw SpecError("unknown state family", family.name);
    }();
    args.finish();

    for (const auto &m : spec.modifiers) {
        ArgReader margs(m);
        if (m.name == "noise") {
            const double p = margs.number("p");
            if (p < 0.0 || p > 1.0) {
                throw SpecError("noise p must lie in [0, 1]", m.to_string());
            }
            margs.finish();
            state = mix_white_noise(state, {p});
        } else if (m.name == "loss") {
            const double eta_a = margs.number("etaA", 1.0);
            const double eta_b = margs.number("etaB", 1.0);
            if (eta_a < 0.0 || eta_a > 1.0 || eta_b < 0.0 || eta_b > 1.0) {
                throw SpecError("loss etas must lie in [0, 1]", m.to_string());
            }
            margs.finish();
            state = apply_loss(state, {eta_a, eta_b});
        } else {
            throw SpecError("unknown modifier", m.name);
        }
    }
    return state;
}

}  // namespace stokeslab
