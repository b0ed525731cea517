#include "cjsr/compilers.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "cjsr/error.hpp"

namespace cjsr {

namespace {

int checked_mode_count(const std::vector<Mat>& modes) {
    if (modes.empty()) throw SchemaError("at least one mode matrix is required");
    int d = static_cast<int>(modes[0].rows());
    for (const auto& m : modes)
        if (m.rows() != d || m.cols() != d)
            throw SchemaError("mode matrices must be square and share one dimension");
    return static_cast<int>(modes.size());
}

std::string word_name(const std::vector<int>& w) {
    std::string s;
    for (int c : w) s += "A" + std::to_string(c);
    return s;
}

bool contains_any(const std::vector<int>& seq, const std::vector<std::vector<int>>& words) {
    for (const auto& w : words) {
        if (w.size() > seq.size()) continue;
        for (size_t i = 0; i + w.size() <= seq.size(); ++i)
            if (std::equal(w.begin(), w.end(), seq.begin() + i)) return true;
    }
    return false;
}

}  // namespace

System compile_markovian(const std::vector<Mat>& modes,
                         const std::vector<std::pair<int, int>>& forbidden) {
    int m = checked_mode_count(modes);
    int d = static_cast<int>(modes[0].rows());
    for (auto [a, b] : forbidden)
        if (a < 1 || a > m || b < 1 || b > m)
            throw SchemaError("forbidden pair uses a mode index outside 1.." + std::to_string(m));
    auto banned = [&](int j, int i) {
        for (auto [a, b] : forbidden)
            if (a == j && b == i) return true;
        return false;
    };
    std::vector<Vertex> verts;
    for (int i = 1; i <= m; ++i) verts.push_back({"A" + std::to_string(i), d});
    std::vector<EdgeSpec> edges;
    int n = 0;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            if (banned(j, i)) continue;
            edges.push_back({"e" + std::to_string(++n), verts[i - 1].id, verts[j - 1].id,
                             "A" + std::to_string(j), modes[j - 1]});
        }
    return build_system(verts, edges);
}

System compile_forbidden_words(const std::vector<Mat>& modes,
                               const std::vector<std::vector<int>>& words) {
    int m = checked_mode_count(modes);
    int d = static_cast<int>(modes[0].rows());
    size_t l = 2;
    for (const auto& w : words) {
        if (w.empty()) throw SchemaError("forbidden words must be nonempty");
        for (int c : w)
            if (c < 1 || c > m)
                throw SchemaError("forbidden word uses a mode index outside 1.." +
                                  std::to_string(m));
        l = std::max(l, w.size());
    }
    if (!words.empty()) {
        size_t longest = 0;
        for (const auto& w : words) longest = std::max(longest, w.size());
        if (longest < 2) throw SchemaError("the longest forbidden word must have length >= 2");
    }

    // All admissible (l-1)-letter memories, in lexicographic order.
    std::vector<std::vector<int>> mem;
    std::vector<int> cur(l - 1, 1);
    for (;;) {
        if (!contains_any(cur, words)) mem.push_back(cur);
        size_t pos = l - 1;
        while (pos > 0 && cur[pos - 1] == m) cur[--pos] = 1;
        if (pos == 0) break;
        cur[pos - 1]++;
    }

    std::map<std::vector<int>, int> index;
    std::vector<Vertex> verts;
    for (const auto& w : mem) {
        index[w] = static_cast<int>(verts.size());
        verts.push_back({word_name(w), d});
    }
    std::vector<EdgeSpec> edges;
    int n = 0;
    for (const auto& beta : mem)
        for (int c = 1; c <= m; ++c) {
            std::vector<int> u;
            u.push_back(c);
            u.insert(u.end(), beta.begin(), beta.end());
            if (contains_any(u, words)) continue;
            std::vector<int> gamma(u.begin(), u.end() - 1);
            auto it = index.find(gamma);
            if (it == index.end()) throw Error("admissible word lost its memory vertex");
            edges.push_back({"e" + std::to_string(++n), word_name(beta), verts[it->second].id,
                             "A" + std::to_string(c), modes[c - 1]});
        }
    return build_system(verts, edges);
}

}  // namespace cjsr
