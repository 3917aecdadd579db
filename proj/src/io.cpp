#include "simmap/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "simmap/error.hpp"

namespace simmap::io {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

/// Calls f(fields, line_no) for each non-blank, non-comment line.
template <class F>
void for_each_record(std::istream& in, const std::string& source, F&& f) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        f(split_tabs(line), line_no);
    }
    if (in.bad()) throw IoError(source + ": read failure after line " + std::to_string(line_no));
}

void expect_fields(const std::vector<std::string_view>& fields, std::size_t n, const std::string& source,
                   std::size_t line) {
    if (fields.size() != n) {
        throw ParseError(source, line, "expected " + std::to_string(n) + " tab-separated fields, found " +
                                           std::to_string(fields.size()));
    }
}

template <class T>
void put_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const std::string& source) {
    std::array<char, sizeof(T)> bytes;
    const auto offset = static_cast<long long>(in.tellg());
    if (!in.read(bytes.data(), sizeof(T))) {
        throw IoError(source + ": truncated binary data at byte offset " + std::to_string(offset));
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError(source, line, "invalid number '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view text, const std::string& source, std::size_t line) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError(source, line, "invalid non-negative integer '" + std::string(text) + "'");
    }
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_metadata(std::ostream& out, const nlohmann::json& meta) { out << "# " << meta.dump() << '\n'; }

void write_cooc(std::ostream& out, const CoocMatrix& cooc, const ItemTable& items, const nlohmann::json& meta) {
    write_metadata(out, meta);
    for (const auto& e : cooc.entries()) out << items.ids[e.a] << '\t' << items.ids[e.b] << '\t' << e.count << '\n';
}

void write_occurrences(std::ostream& out, const ItemTable& items, const nlohmann::json& meta) {
    write_metadata(out, meta);
    for (std::size_t i = 0; i < items.size(); ++i) out << items.ids[i] << '\t' << items.occurrences[i] << '\n';
}

ItemTable read_occurrences(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, std::uint32_t>> rows;
    for_each_record(in, source, [&](const auto& f, std::size_t line) {
        expect_fields(f, 2, source, line);
        if (f[0].empty()) throw ParseError(source, line, "empty item id");
        const auto count = parse_uint(f[1], source, line);
        if (count == 0 || count > UINT32_MAX) throw ParseError(source, line, "occurrence count out of range");
        rows.emplace_back(std::string(f[0]), static_cast<std::uint32_t>(count));
    });
    if (rows.empty()) throw EmptyInputError(source + ": no occurrence records");
    std::sort(rows.begin(), rows.end());
    ItemTable items;
    for (auto& [id, count] : rows) {
        if (!items.ids.empty() && items.ids.back() == id) throw ValidationError(source + ": duplicate item '" + id + "'");
        items.ids.push_back(std::move(id));
        items.occurrences.push_back(count);
    }
    return items;
}

CoocMatrix read_cooc(std::istream& in, const ItemTable& items, const std::string& source) {
    std::vector<CoocEntry> entries;
    for_each_record(in, source, [&](const auto& f, std::size_t line) {
        expect_fields(f, 3, source, line);
        const auto a = items.find(f[0]);
        const auto b = items.find(f[1]);
        if (!a || !b) throw ParseError(source, line, "item missing from the occurrence table");
        const auto count = parse_uint(f[2], source, line);
        if (count == 0 || count > UINT32_MAX) throw ParseError(source, line, "co-occurrence count out of range");
        if (*a == *b) throw ParseError(source, line, "diagonal co-occurrence entry");
        if (count > std::min(items.occurrences[*a], items.occurrences[*b])) {
            throw ParseError(source, line, "co-occurrence exceeds an occurrence count");
        }
        entries.push_back({*a, *b, static_cast<std::uint32_t>(count)});
    });
    try {
        return CoocMatrix(items.size(), std::move(entries));
    } catch (const ContractError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

void write_graph_edges(std::ostream& out, const SimilarityGraph& graph, const nlohmann::json& meta) {
    write_metadata(out, meta);
    for (const auto& e : graph.edges()) out << e.u << '\t' << e.v << '\t' << format_double(e.weight) << '\n';
}

void write_graph_nodes(std::ostream& out, const SimilarityGraph& graph) {
    for (std::size_t i = 0; i < graph.node_count(); ++i) out << i << '\t' << graph.node_ids()[i] << '\n';
}

SimilarityGraph read_graph(std::istream& edges_in, std::istream& nodes_in, const std::string& source) {
    std::vector<std::string> ids;
    const std::string node_source = source + " (nodes)";
    for_each_record(nodes_in, node_source, [&](const auto& f, std::size_t line) {
        expect_fields(f, 2, node_source, line);
        if (parse_uint(f[0], node_source, line) != ids.size()) {
            throw ParseError(node_source, line, "node indices must be dense and in order");
        }
        if (f[1].empty()) throw ParseError(node_source, line, "empty item id");
        ids.emplace_back(f[1]);
    });
    if (ids.empty()) throw EmptyInputError(node_source + ": no nodes");

    std::vector<WeightedEdge> edges;
    for_each_record(edges_in, source, [&](const auto& f, std::size_t line) {
        expect_fields(f, 3, source, line);
        const auto u = parse_uint(f[0], source, line);
        const auto v = parse_uint(f[1], source, line);
        if (u >= v || v >= ids.size()) throw ParseError(source, line, "edge must satisfy i < j < node count");
        const double w = parse_double(f[2], source, line);
        if (!(w >= 0.0 && w < 1.0)) throw ParseError(source, line, "edge weight outside [0, 1)");
        edges.push_back({static_cast<NodeIndex>(u), static_cast<NodeIndex>(v), w});
    });
    try {
        return SimilarityGraph::from_edges(std::move(ids), edges);
    } catch (const ContractError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

void write_geodesic_binary(std::ostream& out, const DenseMatrix& distances) {
    if (distances.rows() > UINT32_MAX || distances.cols() > UINT32_MAX) throw IoError("geodesic matrix too large to dump");
    put_le(out, static_cast<std::uint32_t>(distances.rows()));
    put_le(out, static_cast<std::uint32_t>(distances.cols()));
    for (double v : distances.data()) put_le(out, v);
}

DenseMatrix read_geodesic_binary(std::istream& in, const std::string& source) {
    const auto rows = get_le<std::uint32_t>(in, source);
    const auto cols = get_le<std::uint32_t>(in, source);
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) v = get_le<double>(in, source);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError(source + ": trailing bytes after " + std::to_string(8 + 8ull * rows * cols));
    }
    return m;
}

void write_landmarks(std::ostream& out, const LandmarkSet& set) {
    out << "# strategy=" << strategy_name(set.strategy) << " l=" << set.size() << " s=" << set.seed_count
        << " rng_seed=" << set.rng_seed << '\n';
    for (auto i : set.indices) out << i << '\n';
}

LandmarkSet read_landmarks(std::istream& in, const std::string& source) {
    LandmarkSet set;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (have_header) continue;
            have_header = true;
            std::string_view rest(line);
            rest.remove_prefix(1);
            while (!rest.empty()) {
                const auto space = rest.find(' ');
                const auto token = rest.substr(0, space);
                rest = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
                const auto eq = token.find('=');
                if (eq == std::string_view::npos) continue;
                const auto key = token.substr(0, eq);
                const auto value = token.substr(eq + 1);
                if (key == "strategy") {
                    try {
                        set.strategy = parse_strategy(value);
                    } catch (const ValidationError&) {
                        throw ParseError(source, line_no, "unknown landmark strategy");
                    }
                } else if (key == "l") {
                    declared = parse_uint(value, source, line_no);
                } else if (key == "s") {
                    set.seed_count = parse_uint(value, source, line_no);
                } else if (key == "rng_seed") {
                    set.rng_seed = parse_uint(value, source, line_no);
                }
            }
            continue;
        }
        const auto idx = parse_uint(line, source, line_no);
        if (idx > UINT32_MAX) throw ParseError(source, line_no, "landmark index out of range");
        set.indices.push_back(static_cast<NodeIndex>(idx));
    }
    if (!have_header) throw ParseError(source, 1, "missing landmark header line");
    if (set.indices.empty()) throw EmptyInputError(source + ": no landmarks");
    if (declared != set.indices.size()) throw ValidationError(source + ": header l does not match the listed landmarks");
    return set;
}

void write_embedding(std::ostream& out, const Embedding& emb) {
    out << "#items=" << emb.size() << " dims=" << emb.dims() << " provenance=" << emb.provenance.dump() << '\n';
    out << "#eigenvalues=";
    for (std::size_t k = 0; k < emb.eigenvalues.size(); ++k) out << (k ? "," : "") << format_double(emb.eigenvalues[k]);
    out << '\n';
    for (std::size_t i = 0; i < emb.size(); ++i) {
        out << emb.item_ids.at(i);
        for (double v : emb.coords.row(i)) out << '\t' << format_double(v);
        out << '\n';
    }
}

Embedding read_embedding(std::istream& in, const std::string& source) {
    Embedding emb;
    std::string line;
    std::size_t line_no = 0;
    std::size_t items = 0;
    std::size_t dims = 0;
    bool have_header = false;
    bool have_eigen = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#items=", 0) == 0) {
            const auto dims_pos = line.find(" dims=");
            const auto prov_pos = line.find(" provenance=");
            if (dims_pos == std::string::npos || prov_pos == std::string::npos || prov_pos < dims_pos) {
                throw ParseError(source, line_no, "malformed embedding header");
            }
            items = parse_uint(std::string_view(line).substr(7, dims_pos - 7), source, line_no);
            dims = parse_uint(std::string_view(line).substr(dims_pos + 6, prov_pos - dims_pos - 6), source, line_no);
            try {
                emb.provenance = nlohmann::json::parse(line.substr(prov_pos + 12));
            } catch (const nlohmann::json::exception&) {
                throw ParseError(source, line_no, "provenance is not valid JSON");
            }
            have_header = true;
            continue;
        }
        if (line.rfind("#eigenvalues=", 0) == 0) {
            std::string_view rest = std::string_view(line).substr(13);
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                emb.eigenvalues.push_back(parse_double(rest.substr(0, comma), source, line_no));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            }
            have_eigen = true;
            continue;
        }
        if (line.front() == '#') continue;
        if (!have_header) throw ParseError(source, line_no, "embedding header must precede coordinates");
        const auto fields = split_tabs(line);
        expect_fields(fields, dims + 1, source, line_no);
        emb.item_ids.emplace_back(fields[0]);
        for (std::size_t k = 0; k < dims; ++k) values.push_back(parse_double(fields[k + 1], source, line_no));
    }
    if (!have_header) throw ParseError(source, 1, "missing embedding header");
    if (!have_eigen || emb.eigenvalues.size() != dims) throw ValidationError(source + ": eigenvalue line missing or wrong length");
    if (emb.item_ids.size() != items) {
        throw ValidationError(source + ": header declares " + std::to_string(items) + " items, found " +
                              std::to_string(emb.item_ids.size()));
    }
    emb.coords = DenseMatrix(items, dims);
    std::copy(values.begin(), values.end(), emb.coords.data().begin());
    return emb;
}

void write_residual_curve(std::ostream& out, const std::vector<double>& curve, const nlohmann::json& meta) {
    write_metadata(out, meta);
    for (std::size_t k = 0; k < curve.size(); ++k) out << k + 1 << '\t' << format_double(curve[k]) << '\n';
}

void write_neighborhood_report(std::ostream& out, const NeighborhoodReport& report, const nlohmann::json& meta) {
    write_metadata(out, meta);
    for (const auto& r : report.rows) {
        out << r.size << '\t' << format_double(r.mean) << '\t' << format_double(r.median) << '\t' << format_double(r.q1)
            << '\t' << format_double(r.q3) << '\t' << format_double(r.ci95) << '\n';
    }
}

}  // namespace simmap::io
