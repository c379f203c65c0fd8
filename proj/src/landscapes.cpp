#include "sveda/landscapes.hpp"

#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "sveda/errors.hpp"
#include "sveda/rng.hpp"

namespace sveda {

namespace {

constexpr std::uint64_t kNkdTag = 0x4E4B44ULL;  // "NKD"

std::uint64_t checked_power(std::size_t base, std::size_t exponent, std::uint64_t cap)
{
    std::uint64_t out = 1;
    for (std::size_t e = 0; e < exponent; ++e) {
        if (out > cap / base)
            return cap + 1;
        out *= base;
    }
    return out;
}

std::size_t table_index(const NkdInstance& instance, std::size_t i, const Solution& x)
{
    std::size_t idx = static_cast<std::size_t>(x[i]);
    for (std::size_t nb : instance.links[i])
        idx = idx * instance.d + static_cast<std::size_t>(x[nb]);
    return idx;
}

} // namespace

std::string NkdInstance::problem() const
{
    if (d == 2)
        return "NK";
    if (d == 3)
        return "NK3";
    return "NKD";
}

ModelSpec NkdInstance::model() const
{
    return d == 2 ? ModelSpec::binary(n) : ModelSpec::categorical(n, d);
}

std::size_t NkdInstance::table_size() const
{
    return static_cast<std::size_t>(checked_power(d, k + 1, std::numeric_limits<std::uint32_t>::max()));
}

void NkdInstance::validate() const
{
    if (n == 0)
        throw ContractViolation("instance needs n >= 1");
    if (d < 2)
        throw ContractViolation("instance needs d >= 2");
    if (k >= n)
        throw ContractViolation("instance needs k < n");
    if (links.size() != n || tables.size() != n)
        throw ContractViolation("instance needs exactly n link rows and n tables");
    const std::size_t expected = table_size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = links[i];
        if (row.size() != k)
            throw ContractViolation("links row " + std::to_string(i) + " does not have k entries");
        for (std::size_t a = 0; a < row.size(); ++a) {
            if (row[a] >= n || row[a] == i)
                throw ContractViolation("links row " + std::to_string(i) + " has invalid neighbor " +
                                        std::to_string(row[a]));
            for (std::size_t b = a + 1; b < row.size(); ++b)
                if (row[a] == row[b])
                    throw ContractViolation("links row " + std::to_string(i) + " repeats a neighbor");
        }
        if (tables[i].size() != expected)
            throw ContractViolation("table " + std::to_string(i) + " has " + std::to_string(tables[i].size()) +
                                    " entries, expected " + std::to_string(expected));
        for (double v : tables[i])
            if (!(v >= 0.0 && v < 1.0))
                throw ContractViolation("table " + std::to_string(i) + " has value outside [0, 1)");
    }
}

NkdInstance generate_nkd(std::size_t n, std::size_t k, std::size_t d, std::uint64_t seed)
{
    if (n == 0 || d < 2 || k >= n)
        throw ContractViolation("invalid NKD parameters: need n >= 1, d >= 2, 0 <= k < n");
    if (checked_power(d, k + 1, std::uint64_t{1} << 28) > (std::uint64_t{1} << 28))
        throw ContractViolation("NKD table size d^(k+1) is too large");

    NkdInstance inst;
    inst.n = n;
    inst.k = k;
    inst.d = d;
    inst.seed = seed;
    CounterRng rng(derive_key(seed, {kNkdTag, n, k, d}));

    // Neighbors: partial Fisher-Yates over [0, n) \ {i}.
    std::vector<std::size_t> pool(n - 1);
    inst.links.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0, w = 0; v < n; ++v)
            if (v != i)
                pool[w++] = v;
        auto& row = inst.links[i];
        row.resize(k);
        for (std::size_t a = 0; a < k; ++a) {
            const std::size_t pick = a + static_cast<std::size_t>(rng.below(pool.size() - a));
            std::swap(pool[a], pool[pick]);
            row[a] = pool[a];
        }
    }

    const std::size_t size = inst.table_size();
    inst.tables.assign(n, std::vector<double>(size));
    for (auto& table : inst.tables)
        for (double& v : table)
            v = rng.uniform01();
    return inst;
}

double subfunction(const NkdInstance& instance, std::size_t i, const Solution& x)
{
    return instance.tables[i][table_index(instance, i, x)];
}

double evaluate(const NkdInstance& instance, const Solution& x)
{
    check_solution(instance.model(), x);
    double total = 0.0;
    for (std::size_t i = 0; i < instance.n; ++i)
        total += instance.tables[i][table_index(instance, i, x)];
    return total / static_cast<double>(instance.n);
}

std::pair<Solution, double> enumerate_optimum(const NkdInstance& instance)
{
    const std::uint64_t space = checked_power(instance.d, instance.n, kMaxEnumeration);
    if (space > kMaxEnumeration)
        throw SearchSpaceTooLarge("search space D^n exceeds 2^24; refusing to enumerate");

    // Odometer with the last coordinate fastest visits solutions in lexicographic order.
    Solution x(instance.n, 0);
    Solution best = x;
    double best_fitness = -std::numeric_limits<double>::infinity();
    const int top = static_cast<int>(instance.d) - 1;
    for (std::uint64_t count = 0; count < space; ++count) {
        const double f = evaluate(instance, x);
        if (f > best_fitness) {
            best_fitness = f;
            best = x;
        }
        for (std::size_t pos = instance.n; pos-- > 0;) {
            if (x[pos] < top) {
                ++x[pos];
                break;
            }
            x[pos] = 0;
        }
    }
    return {best, best_fitness};
}

std::string to_text(const NkdInstance& instance)
{
    nlohmann::ordered_json doc;
    doc["problem"] = instance.problem();
    doc["n"] = instance.n;
    doc["k"] = instance.k;
    doc["d"] = instance.d;
    doc["seed"] = instance.seed;
    doc["links"] = instance.links;
    doc["tables"] = instance.tables;
    return doc.dump(1) + "\n";
}

NkdInstance from_text(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance file is not valid JSON: ") + e.what());
    }

    auto field = [&](const char* name) -> const nlohmann::json& {
        if (!doc.is_object() || !doc.contains(name))
            throw ParseError(std::string("instance file is missing field '") + name + "'");
        return doc.at(name);
    };

    NkdInstance inst;
    try {
        inst.n = field("n").get<std::size_t>();
        inst.k = field("k").get<std::size_t>();
        inst.d = field("d").get<std::size_t>();
        inst.seed = field("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::type_error& e) {
        throw ParseError(std::string("instance header has a malformed number: ") + e.what());
    }
    const std::string problem = field("problem").get<std::string>();

    const auto& links = field("links");
    const auto& tables = field("tables");
    if (!links.is_array() || links.size() != inst.n)
        throw ParseError("field 'links' must hold n rows");
    if (!tables.is_array() || tables.size() != inst.n)
        throw ParseError("field 'tables' must hold n rows");
    if (inst.d < 2 || inst.k >= inst.n)
        throw ParseError("header needs d >= 2 and k < n");

    const std::size_t expected = inst.table_size();
    for (std::size_t i = 0; i < inst.n; ++i) {
        try {
            inst.links.push_back(links[i].get<std::vector<std::size_t>>());
        } catch (const nlohmann::json::exception&) {
            throw ParseError("links row " + std::to_string(i) + " is not a list of indices");
        }
        if (!tables[i].is_array() || tables[i].size() != expected)
            throw ParseError("table " + std::to_string(i) + " has " +
                             std::to_string(tables[i].is_array() ? tables[i].size() : 0) + " entries, expected " +
                             std::to_string(expected));
        try {
            inst.tables.push_back(tables[i].get<std::vector<double>>());
        } catch (const nlohmann::json::exception&) {
            throw ParseError("table " + std::to_string(i) + " holds a non-numeric entry");
        }
    }

    inst.validate();
    if (problem != inst.problem())
        throw ParseError("field 'problem' is '" + problem + "' but d=" + std::to_string(inst.d) + " implies '" +
                         inst.problem() + "'");
    return inst;
}

void save(const NkdInstance& instance, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << to_text(instance);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

NkdInstance load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open instance file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return from_text(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace sveda
