#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "hclab/error.hpp"
#include "hclab/format.hpp"
#include "hclab/model.hpp"

namespace hclab {

void write_graph(std::ostream& out, const PlantedGraph& graph, const ModelParams& params)
{
    out << "n=" << graph.n() << " kappa=" << format_double(params.kappa) << " a=" << format_double(params.a)
        << " b=" << format_double(params.b) << " seed=" << graph.seed() << '\n';
    const auto& m = graph.membership();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i)
            out << ' ';
        out << static_cast<int>(m[i]);
    }
    out << '\n';
    for (const auto& [i, j] : graph.edges())
        out << i << ' ' << j << '\n';
}

namespace {

template <class T>
T parse_number(std::string_view text, const char* what)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(std::string("graph file: bad value for ") + what + ": '" + std::string(text) + "'");
    return value;
}

std::string_view expect_field(std::istringstream& header, const std::string& key, std::string& storage)
{
    if (!(header >> storage) || storage.rfind(key + "=", 0) != 0)
        fail("graph file: header must read 'n=.. kappa=.. a=.. b=.. seed=..' (missing " + key + ")");
    return std::string_view(storage).substr(key.size() + 1);
}

}  // namespace

GraphFile read_graph(std::istream& in)
{
    std::string line;
    // Leading "#" lines are metadata and ignored.
    do {
        if (!std::getline(in, line))
            fail("graph file: empty input");
    } while (!line.empty() && line.front() == '#');
    std::istringstream header(line);
    std::string tok;
    const auto n = parse_number<std::size_t>(expect_field(header, "n", tok), "n");
    ModelParams params;
    params.n = n;
    params.kappa = parse_number<double>(expect_field(header, "kappa", tok), "kappa");
    params.a = parse_number<double>(expect_field(header, "a", tok), "a");
    params.b = parse_number<double>(expect_field(header, "b", tok), "b");
    const auto seed = parse_number<std::uint64_t>(expect_field(header, "seed", tok), "seed");
    if (header >> tok)
        fail("graph file: unexpected header token '" + tok + "'");

    if (!std::getline(in, line))
        fail("graph file: missing membership line");
    std::vector<std::uint8_t> membership;
    membership.reserve(n);
    std::istringstream bits(line);
    while (bits >> tok) {
        if (tok != "0" && tok != "1")
            fail("graph file: membership entries must be 0 or 1");
        membership.push_back(tok == "1");
    }

    std::vector<Edge> edges;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream pair(line);
        std::uint64_t i = 0;
        std::uint64_t j = 0;
        std::string extra;
        if (!(pair >> i >> j) || (pair >> extra))
            fail("graph file: malformed edge on line " + std::to_string(lineno));
        if (i >= n || j >= n)
            fail("graph file: edge endpoint out of range on line " + std::to_string(lineno));
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    return GraphFile{params, PlantedGraph(n, std::move(edges), std::move(membership), seed)};
}

}  // namespace hclab
