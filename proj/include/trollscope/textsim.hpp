#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "trollscope/csv.hpp"

namespace trollscope {

namespace unicode {

// Decodes the UTF-8 sequence starting at s[i]; advances i. Invalid bytes
// decode as U+FFFD and advance by one.
inline uint32_t decode_utf8(const std::string& s, size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto cont = [&](size_t k) {
        return i + k < s.size() &&
               (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        uint32_t cp = (uint32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp >= 0x80 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        uint32_t cp = (uint32_t(b0 & 0x0F) << 12) |
                      (uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        i += 3;
        return cp >= 0x800 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        uint32_t cp = (uint32_t(b0 & 0x07) << 18) |
                      (uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                      (uint32_t(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        i += 4;
        return (cp >= 0x10000 && cp <= 0x10FFFF) ? cp : 0xFFFD;
    }
    ++i;
    return 0xFFFD;
}

inline void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Simple case fold covering ASCII, Latin-1 Supplement, Latin Extended-A,
// and Cyrillic — enough for Bulgarian/English forum text.
inline uint32_t fold_codepoint(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // À..Þ except ×
    if (cp >= 0x100 && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;   // А..Я
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;   // Ѐ..Џ
    if (cp >= 0x460 && cp <= 0x4FF) return (cp % 2 == 0) ? cp + 1 : cp;
    return cp;
}

inline bool is_word_codepoint(uint32_t cp) {
    if (cp >= '0' && cp <= '9') return true;
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;  // Latin-1 letters
    if (cp >= 0x100 && cp <= 0x17F) return true;                            // Latin Extended-A
    if (cp >= 0x400 && cp <= 0x4FF) return true;                            // Cyrillic
    return false;
}

}  // namespace unicode

// Case-folds a whole UTF-8 string, leaving non-letter bytes intact.
inline std::string fold_utf8(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) unicode::encode_utf8(unicode::fold_codepoint(unicode::decode_utf8(text, i)), out);
    return out;
}

// Case-folded word tokens split at non-alphanumeric boundaries. Length-1
// tokens are kept; Latin and Cyrillic are both supported.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    size_t i = 0;
    while (i < text.size()) {
        uint32_t cp = unicode::decode_utf8(text, i);
        if (unicode::is_word_codepoint(cp)) {
            unicode::encode_utf8(unicode::fold_codepoint(cp), cur);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// Sparse vector as sorted (index, weight) pairs with strictly increasing
// indices and finite weights.
using SparseVector = std::vector<std::pair<uint32_t, double>>;

inline double sparse_norm(const SparseVector& v) {
    double s = 0;
    for (const auto& [i, w] : v) s += w * w;
    return std::sqrt(s);
}

inline double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double s = 0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) ++i;
        else if (a[i].first > b[j].first) ++j;
        else s += a[i++].second * b[j++].second;
    }
    return s;
}

// dot(a,b) / (|a||b|); 0 when either norm is 0. Non-negative weights keep
// the result in [0, 1].
inline double cosine(const SparseVector& a, const SparseVector& b) {
    const double na = sparse_norm(a), nb = sparse_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return sparse_dot(a, b) / (na * nb);
}

// Term dictionary with document frequencies. Term indices are dense and
// assigned in lexicographic order, so a fitted vocabulary is deterministic.
class Vocabulary {
public:
    static constexpr const char* kFormatTag = "trollscope-vocab v1";

    Vocabulary() = default;

    static Vocabulary fit(const std::vector<std::vector<std::string>>& documents) {
        if (documents.empty())
            throw std::invalid_argument("fit_vocabulary: need at least one document");
        std::map<std::string, int64_t> df;
        std::set<std::string> uniq;
        for (const auto& doc : documents) {
            uniq.clear();
            uniq.insert(doc.begin(), doc.end());
            for (const auto& tok : uniq) ++df[tok];
        }
        Vocabulary v;
        v.n_documents_ = static_cast<int64_t>(documents.size());
        v.terms_.reserve(df.size());
        v.df_.reserve(df.size());
        for (const auto& [term, count] : df) {
            v.index_.emplace(term, static_cast<uint32_t>(v.terms_.size()));
            v.terms_.push_back(term);
            v.df_.push_back(count);
        }
        return v;
    }

    int64_t document_count() const { return n_documents_; }
    size_t size() const { return terms_.size(); }

    int64_t df(const std::string& term) const {
        auto it = index_.find(term);
        return it == index_.end() ? 0 : df_[it->second];
    }

    // Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1.
    double idf(uint32_t term_index) const {
        return std::log((1.0 + static_cast<double>(n_documents_)) /
                        (1.0 + static_cast<double>(df_[term_index]))) +
               1.0;
    }

    // tf(t) * idf(t) with raw term counts; unknown tokens are dropped.
    SparseVector vectorize(const std::vector<std::string>& tokens) const {
        std::unordered_map<uint32_t, int64_t> tf;
        for (const auto& tok : tokens) {
            auto it = index_.find(tok);
            if (it != index_.end()) ++tf[it->second];
        }
        SparseVector v;
        v.reserve(tf.size());
        for (const auto& [idx, count] : tf)
            v.emplace_back(idx, static_cast<double>(count) * idf(idx));
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    }

    void save(const std::string& path) const {
        std::ostringstream out;
        out << kFormatTag << "\n" << "N " << n_documents_ << "\n";
        for (size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << "\t" << df_[i] << "\n";
        write_file(path, out.str());
    }

    static Vocabulary load(const std::string& path) {
        auto lines = read_lines(path);
        if (lines.size() < 2 || lines[0] != kFormatTag)
            throw DataError("not a vocabulary file: " + path);
        Vocabulary v;
        if (std::sscanf(lines[1].c_str(), "N %lld", reinterpret_cast<long long*>(&v.n_documents_)) != 1)
            throw DataError("vocabulary file missing document count: " + path);
        for (size_t i = 2; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            size_t tab = lines[i].rfind('\t');
            if (tab == std::string::npos)
                throw DataError(path + " line " + std::to_string(i + 1) + ": expected term\\tdf");
            std::string term = lines[i].substr(0, tab);
            int64_t df = std::strtoll(lines[i].c_str() + tab + 1, nullptr, 10);
            if (df < 1 || df > v.n_documents_)
                throw DataError(path + " line " + std::to_string(i + 1) + ": df out of range");
            v.index_.emplace(term, static_cast<uint32_t>(v.terms_.size()));
            v.terms_.push_back(std::move(term));
            v.df_.push_back(df);
        }
        return v;
    }

private:
    int64_t n_documents_ = 0;
    std::vector<std::string> terms_;
    std::vector<int64_t> df_;
    std::unordered_map<std::string, uint32_t> index_;
};

}  // namespace trollscope
