#pragma once

// Plain-text instance format, one file per instance:
//
//   line 1: k n_1 n_2 ... n_k
//   every further nonempty line not starting with '#': k integers, the i-th
//   being the 0-based index of the edge's vertex in class i.
//
// Duplicate edge lines are an error. '#' lines are comments; generators put a
// "# genspec: ..." header there.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "graph.hpp"

namespace hypermatch {

inline KPGraph read_instance(std::istream& in) {
    std::string line;
    int lineno = 0;
    int k = -1;
    std::vector<int> sizes;
    std::vector<std::vector<int>> edges;

    auto is_comment = [](const std::string& s) {
        for (char ch : s) {
            if (ch == ' ' || ch == '\t' || ch == '\r') continue;
            return ch == '#';
        }
        return true; // blank
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment(line)) continue;
        std::istringstream ss(line);
        if (k < 0) {
            if (!(ss >> k) || k < 2)
                throw input_error("line " + std::to_string(lineno) + ": bad header");
            sizes.resize(k);
            for (int c = 0; c < k; ++c)
                if (!(ss >> sizes[c]) || sizes[c] < 0)
                    throw input_error("line " + std::to_string(lineno) + ": bad class size");
            int extra;
            if (ss >> extra)
                throw input_error("line " + std::to_string(lineno) + ": trailing tokens in header");
            continue;
        }
        std::vector<int> e(k);
        for (int c = 0; c < k; ++c)
            if (!(ss >> e[c]))
                throw input_error("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(k) + " vertex indices");
        int extra;
        if (ss >> extra)
            throw input_error("line " + std::to_string(lineno) + ": trailing tokens in edge");
        edges.push_back(std::move(e));
    }
    if (k < 0) throw input_error("empty instance file");
    return KPGraph(k, sizes, edges);
}

inline KPGraph read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    return read_instance(in);
}

inline void write_instance(std::ostream& out, const KPGraph& g,
                           const std::vector<std::string>& comments = {}) {
    for (const std::string& c : comments) out << "# " << c << "\n";
    out << g.k();
    for (int c = 1; c <= g.k(); ++c) out << ' ' << g.class_size(c);
    out << "\n";
    for (int id = 0; id < g.edge_rows(); ++id) {
        if (!g.edge_alive(id)) continue;
        auto e = g.edge(id);
        for (int c = 0; c < g.k(); ++c) out << (c ? " " : "") << e[c];
        out << "\n";
    }
}

inline void write_instance_file(const std::string& path, const KPGraph& g,
                                const std::vector<std::string>& comments = {}) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open " + path + " for writing");
    write_instance(out, g, comments);
}

} // namespace hypermatch
