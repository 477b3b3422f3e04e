#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "trollscope/csv.hpp"
#include "trollscope/tz.hpp"

namespace trollscope {

class CorpusError : public DataError {
public:
    explicit CorpusError(const std::string& what) : DataError(what) {}
};

struct Publication {
    std::string id;
    std::string category;
    std::string subcategory;
    std::vector<std::string> tags;
    std::string title;
    std::string body;
    int64_t published_at = 0;
};

struct Comment {
    std::string id;
    std::string publication_id;
    std::string author_id;
    std::string parent_comment_id;  // empty = top-level
    std::string body;
    int64_t posted_at = 0;
    int64_t votes_up = 0;
    int64_t votes_down = 0;
};

struct User {
    std::string id;
    std::string display_name;
};

struct UserActivityStats {
    std::string user_id;
    int64_t total_comments = 0;
    int64_t days_in_forum = 0;   // first comment day .. corpus end day, inclusive
    int64_t active_days = 0;     // distinct local calendar days with >= 1 comment
    int64_t publications_commented = 0;
};

// Per-comment wall-clock fields in the forum's timezone.
struct CommentLocal {
    int32_t local_day;  // local days since 1970-01-01
    int8_t hour;        // 0..23
    int8_t weekday;     // 0 = Monday .. 6 = Sunday
};

struct ThreadEntry {
    size_t comment_index;  // into Corpus::comments()
    int ordinal;           // 1-based position in posting order
    int depth;             // 0 = top-level
};

struct ThreadView {
    std::string publication_id;
    std::vector<ThreadEntry> entries;  // posted_at ascending, ties by comment id
};

enum class VoteDirection { loved, hated };

struct CorpusData {
    std::vector<Publication> publications;
    std::vector<Comment> comments;
    std::vector<User> users;
};

// Immutable, fully indexed forum corpus. Thread-safe for concurrent reads.
class Corpus {
public:
    Corpus(CorpusData data, TimeZone zone, std::string zone_id)
        : pubs_(std::move(data.publications)),
          comments_(std::move(data.comments)),
          users_(std::move(data.users)),
          zone_(std::move(zone)),
          zone_id_(std::move(zone_id)) {
        build_indices();
    }

    const std::vector<Publication>& publications() const { return pubs_; }
    const std::vector<Comment>& comments() const { return comments_; }
    const std::vector<User>& users() const { return users_; }
    const TimeZone& zone() const { return zone_; }
    const std::string& zone_id() const { return zone_id_; }

    // Max posted_at over all comments; the publication horizon when there
    // are none.
    int64_t end_time() const { return end_time_; }

    bool has_publication(const std::string& id) const { return pub_by_id_.count(id) != 0; }
    bool has_user(const std::string& id) const { return user_by_id_.count(id) != 0; }

    size_t publication_index(const std::string& id) const {
        auto it = pub_by_id_.find(id);
        if (it == pub_by_id_.end()) throw CorpusError("unknown publication id '" + id + "'");
        return it->second;
    }

    size_t user_index(const std::string& id) const {
        auto it = user_by_id_.find(id);
        if (it == user_by_id_.end()) throw CorpusError("unknown user id '" + id + "'");
        return it->second;
    }

    size_t comment_index(const std::string& id) const {
        auto it = comment_by_id_.find(id);
        if (it == comment_by_id_.end()) throw CorpusError("unknown comment id '" + id + "'");
        return it->second;
    }

    const ThreadView& thread_view(const std::string& publication_id) const {
        return threads_[publication_index(publication_id)];
    }

    const ThreadView& thread_view_at(size_t pub_index) const { return threads_[pub_index]; }

    int depth_of(size_t comment_index) const { return depth_[comment_index]; }
    int ordinal_of(size_t comment_index) const { return ordinal_[comment_index]; }
    CommentLocal local_of(size_t comment_index) const { return local_[comment_index]; }

    // Storage indices of the user's comments, in posted order.
    const std::vector<size_t>& comments_of(size_t user_index) const {
        return by_user_[user_index];
    }

    // Direct children of a comment, in thread order.
    const std::vector<size_t>& children_of(size_t comment_index) const {
        return children_[comment_index];
    }

    UserActivityStats activity_stats(const std::string& user_id) const {
        return stats_[user_index(user_id)];
    }

    // Distinct local days on which the user posted more than one comment.
    int64_t multi_comment_days(size_t user_index) const { return multi_days_[user_index]; }

    // Users who authored at least one direct reply to this comment, besides
    // its own author.
    int64_t replies_by_others(size_t comment_index) const { return child_by_other_[comment_index]; }

private:
    void build_indices() {
        pub_by_id_.reserve(pubs_.size());
        for (size_t i = 0; i < pubs_.size(); ++i) {
            if (!pub_by_id_.emplace(pubs_[i].id, i).second)
                throw CorpusError("duplicate publication id '" + pubs_[i].id + "'");
        }
        user_by_id_.reserve(users_.size());
        for (size_t i = 0; i < users_.size(); ++i) {
            if (!user_by_id_.emplace(users_[i].id, i).second)
                throw CorpusError("duplicate user id '" + users_[i].id + "'");
        }
        comment_by_id_.reserve(comments_.size());
        for (size_t i = 0; i < comments_.size(); ++i) {
            if (!comment_by_id_.emplace(comments_[i].id, i).second)
                throw CorpusError("duplicate comment id '" + comments_[i].id + "'");
        }

        end_time_ = 0;
        bool first = true;
        for (const auto& p : pubs_) {
            if (first || p.published_at > end_time_) end_time_ = p.published_at;
            first = false;
        }
        for (const auto& c : comments_) {
            if (first || c.posted_at > end_time_) end_time_ = c.posted_at;
            first = false;
        }

        // reference checks
        for (const auto& c : comments_) {
            auto pit = pub_by_id_.find(c.publication_id);
            if (pit == pub_by_id_.end())
                throw CorpusError("comment '" + c.id + "': dangling publication_id '" +
                                  c.publication_id + "'");
            if (user_by_id_.find(c.author_id) == user_by_id_.end())
                throw CorpusError("comment '" + c.id + "': dangling author_id '" + c.author_id +
                                  "'");
            if (c.posted_at < pubs_[pit->second].published_at)
                throw CorpusError("comment '" + c.id + "' posted before publication '" +
                                  c.publication_id + "' was published");
            if (!c.parent_comment_id.empty()) {
                auto it = comment_by_id_.find(c.parent_comment_id);
                if (it == comment_by_id_.end())
                    throw CorpusError("comment '" + c.id + "': dangling parent_comment_id '" +
                                      c.parent_comment_id + "'");
                if (comments_[it->second].publication_id != c.publication_id)
                    throw CorpusError("comment '" + c.id + "': parent_comment_id '" +
                                      c.parent_comment_id + "' belongs to a different publication");
            }
            if (c.votes_up < 0 || c.votes_down < 0)
                throw CorpusError("comment '" + c.id + "': negative vote count");
        }

        // reply depths; walking parent chains also catches cycles
        depth_.assign(comments_.size(), -1);
        for (size_t i = 0; i < comments_.size(); ++i) {
            if (depth_[i] >= 0) continue;
            std::vector<size_t> chain;
            size_t cur = i;
            while (true) {
                if (depth_[cur] >= 0) break;
                for (size_t seen : chain)
                    if (seen == cur)
                        throw CorpusError("reply cycle involving comment '" + comments_[cur].id +
                                          "'");
                chain.push_back(cur);
                if (comments_[cur].parent_comment_id.empty()) {
                    depth_[cur] = 0;
                    break;
                }
                cur = comment_by_id_.at(comments_[cur].parent_comment_id);
            }
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                const Comment& c = comments_[*it];
                depth_[*it] = c.parent_comment_id.empty()
                                  ? 0
                                  : depth_[comment_by_id_.at(c.parent_comment_id)] + 1;
            }
        }

        // thread views: per publication, comments by (posted_at, id)
        threads_.resize(pubs_.size());
        ordinal_.assign(comments_.size(), 0);
        std::vector<std::vector<size_t>> per_pub(pubs_.size());
        for (size_t i = 0; i < comments_.size(); ++i)
            per_pub[pub_by_id_.at(comments_[i].publication_id)].push_back(i);
        for (size_t p = 0; p < pubs_.size(); ++p) {
            auto& order = per_pub[p];
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                if (comments_[a].posted_at != comments_[b].posted_at)
                    return comments_[a].posted_at < comments_[b].posted_at;
                return comments_[a].id < comments_[b].id;
            });
            ThreadView& tv = threads_[p];
            tv.publication_id = pubs_[p].id;
            tv.entries.reserve(order.size());
            for (size_t r = 0; r < order.size(); ++r) {
                tv.entries.push_back({order[r], static_cast<int>(r + 1), depth_[order[r]]});
                ordinal_[order[r]] = static_cast<int>(r + 1);
            }
        }

        // children lists and reply-by-other counts
        children_.assign(comments_.size(), {});
        child_by_other_.assign(comments_.size(), 0);
        for (const auto& tv : threads_) {
            for (const auto& e : tv.entries) {
                const Comment& c = comments_[e.comment_index];
                if (c.parent_comment_id.empty()) continue;
                size_t parent = comment_by_id_.at(c.parent_comment_id);
                children_[parent].push_back(e.comment_index);
                if (comments_[parent].author_id != c.author_id) ++child_by_other_[parent];
            }
        }

        // local wall-clock fields and per-user activity
        local_.resize(comments_.size());
        for (size_t i = 0; i < comments_.size(); ++i) {
            LocalTime lt = zone_.local_at(comments_[i].posted_at);
            local_[i] = {static_cast<int32_t>(lt.local_day), static_cast<int8_t>(lt.hour),
                         static_cast<int8_t>(lt.weekday)};
        }
        by_user_.assign(users_.size(), {});
        for (size_t i = 0; i < comments_.size(); ++i)
            by_user_[user_by_id_.at(comments_[i].author_id)].push_back(i);
        for (auto& v : by_user_)
            std::sort(v.begin(), v.end(), [&](size_t a, size_t b) {
                if (comments_[a].posted_at != comments_[b].posted_at)
                    return comments_[a].posted_at < comments_[b].posted_at;
                return comments_[a].id < comments_[b].id;
            });

        const int64_t end_day = zone_.local_at(end_time_).local_day;
        stats_.resize(users_.size());
        multi_days_.assign(users_.size(), 0);
        for (size_t u = 0; u < users_.size(); ++u) {
            UserActivityStats st;
            st.user_id = users_[u].id;
            st.total_comments = static_cast<int64_t>(by_user_[u].size());
            if (!by_user_[u].empty()) {
                std::vector<int32_t> days;
                std::unordered_set<std::string> pubs;
                days.reserve(by_user_[u].size());
                for (size_t ci : by_user_[u]) {
                    days.push_back(local_[ci].local_day);
                    pubs.insert(comments_[ci].publication_id);
                }
                std::sort(days.begin(), days.end());
                int64_t active = 0, multi = 0;
                for (size_t i = 0; i < days.size();) {
                    size_t j = i;
                    while (j < days.size() && days[j] == days[i]) ++j;
                    ++active;
                    if (j - i >= 2) ++multi;
                    i = j;
                }
                st.active_days = active;
                st.days_in_forum = end_day - days.front() + 1;
                st.publications_commented = static_cast<int64_t>(pubs.size());
                multi_days_[u] = multi;
            }
            stats_[u] = st;
        }
    }

    std::vector<Publication> pubs_;
    std::vector<Comment> comments_;
    std::vector<User> users_;
    TimeZone zone_;
    std::string zone_id_;
    int64_t end_time_ = 0;

    std::unordered_map<std::string, size_t> pub_by_id_;
    std::unordered_map<std::string, size_t> user_by_id_;
    std::unordered_map<std::string, size_t> comment_by_id_;
    std::vector<ThreadView> threads_;
    std::vector<int> depth_;
    std::vector<int> ordinal_;
    std::vector<CommentLocal> local_;
    std::vector<std::vector<size_t>> by_user_;
    std::vector<std::vector<size_t>> children_;
    std::vector<int64_t> child_by_other_;
    std::vector<UserActivityStats> stats_;
    std::vector<int64_t> multi_days_;
};

// The k comments with the most up-votes (loved) or down-votes (hated); ties
// go to the earlier posted_at, then the smaller comment id. Returns comment
// storage indices in rank order; whole thread when it has fewer than k.
inline std::vector<size_t> top_k_by_votes(const Corpus& corpus, const ThreadView& thread, size_t k,
                                          VoteDirection direction) {
    if (k < 1) throw std::invalid_argument("top_k_by_votes: k must be >= 1");
    const auto& comments = corpus.comments();
    std::vector<size_t> order;
    order.reserve(thread.entries.size());
    for (const auto& e : thread.entries) order.push_back(e.comment_index);
    auto votes = [&](size_t i) {
        return direction == VoteDirection::loved ? comments[i].votes_up : comments[i].votes_down;
    };
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (votes(a) != votes(b)) return votes(a) > votes(b);
        if (comments[a].posted_at != comments[b].posted_at)
            return comments[a].posted_at < comments[b].posted_at;
        return comments[a].id < comments[b].id;
    });
    if (order.size() > k) order.resize(k);
    return order;
}

namespace detail {

inline std::string json_string(const nlohmann::json& j, const char* field, bool required = true) {
    auto it = j.find(field);
    if (it == j.end()) {
        if (required) throw std::invalid_argument(std::string("missing field '") + field + "'");
        return {};
    }
    if (!it->is_string())
        throw std::invalid_argument(std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

inline int64_t json_count(const nlohmann::json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + field + "'");
    if (!it->is_number_integer() || it->get<int64_t>() < 0)
        throw std::invalid_argument(std::string("field '") + field +
                                    "' must be a non-negative integer");
    return it->get<int64_t>();
}

template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
    std::ifstream f(path);
    if (!f) throw CorpusError("cannot open corpus file: " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
            fn(j);
        } catch (const std::exception& e) {
            throw CorpusError(path + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace detail

// Loads the three JSONL corpus files from `dir`, validates every invariant,
// and builds all indices. Local-time fields use the given IANA timezone.
inline Corpus load_corpus(const std::string& dir, const std::string& timezone_id) {
    TimeZone zone = TimeZone::load(timezone_id);
    CorpusData data;
    detail::for_each_jsonl(dir + "/publications.jsonl", [&](const nlohmann::json& j) {
        Publication p;
        p.id = detail::json_string(j, "id");
        if (p.id.empty()) throw std::invalid_argument("empty publication id");
        p.category = detail::json_string(j, "category");
        p.subcategory = detail::json_string(j, "subcategory");
        p.title = detail::json_string(j, "title");
        p.body = detail::json_string(j, "body");
        auto tags = j.find("tags");
        if (tags == j.end() || !tags->is_array())
            throw std::invalid_argument("field 'tags' must be an array of strings");
        for (const auto& t : *tags) {
            if (!t.is_string()) throw std::invalid_argument("field 'tags' must be an array of strings");
            p.tags.push_back(t.get<std::string>());
        }
        p.published_at = parse_rfc3339(detail::json_string(j, "published_at"));
        data.publications.push_back(std::move(p));
    });
    detail::for_each_jsonl(dir + "/comments.jsonl", [&](const nlohmann::json& j) {
        Comment c;
        c.id = detail::json_string(j, "id");
        if (c.id.empty()) throw std::invalid_argument("empty comment id");
        c.publication_id = detail::json_string(j, "publication_id");
        c.author_id = detail::json_string(j, "author_id");
        c.parent_comment_id = detail::json_string(j, "parent_comment_id", false);
        c.body = detail::json_string(j, "body");
        c.posted_at = parse_rfc3339(detail::json_string(j, "posted_at"));
        c.votes_up = detail::json_count(j, "votes_up");
        c.votes_down = detail::json_count(j, "votes_down");
        data.comments.push_back(std::move(c));
    });
    detail::for_each_jsonl(dir + "/users.jsonl", [&](const nlohmann::json& j) {
        User u;
        u.id = detail::json_string(j, "id");
        if (u.id.empty()) throw std::invalid_argument("empty user id");
        u.display_name = detail::json_string(j, "display_name");
        data.users.push_back(std::move(u));
    });
    return Corpus(std::move(data), std::move(zone), timezone_id);
}

}  // namespace trollscope
