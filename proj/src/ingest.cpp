#include "simmap/ingest.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "simmap/error.hpp"
#include "simmap/parallel.hpp"

namespace simmap {

std::optional<ItemIndex> ItemTable::find(std::string_view id) const {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<ItemIndex>(it - ids.begin());
}

ProfileStore ProfileStore::from_records(const std::vector<std::pair<std::string, std::string>>& records) {
    if (records.empty()) throw EmptyInputError("profile input contains no records");

    std::vector<std::string> item_ids;
    item_ids.reserve(records.size());
    for (const auto& [user, item] : records) item_ids.push_back(item);
    std::sort(item_ids.begin(), item_ids.end());
    item_ids.erase(std::unique(item_ids.begin(), item_ids.end()), item_ids.end());

    ProfileStore store;
    store.items_.ids = std::move(item_ids);
    store.items_.occurrences.assign(store.items_.ids.size(), 0);

    std::map<std::string_view, std::size_t> user_slot;
    std::vector<UserProfile> by_arrival;
    std::vector<std::unordered_set<ItemIndex>> seen;
    for (const auto& [user, item] : records) {
        auto [it, inserted] = user_slot.try_emplace(user, by_arrival.size());
        if (inserted) {
            by_arrival.push_back(UserProfile{user, {}});
            seen.emplace_back();
        }
        const ItemIndex idx = *store.items_.find(item);
        if (seen[it->second].insert(idx).second) {
            by_arrival[it->second].items.push_back(idx);
            ++store.items_.occurrences[idx];
        }
    }

    store.users_.reserve(by_arrival.size());
    for (const auto& [id, slot] : user_slot) store.users_.push_back(std::move(by_arrival[slot]));
    return store;
}

namespace detail {

std::pair<std::string_view, std::string_view> split_record(std::string_view line, const std::string& source,
                                                           std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(source, line_no, "expected two tab-separated fields");
    const auto first = line.substr(0, tab);
    const auto second = line.substr(tab + 1);
    if (second.find('\t') != std::string_view::npos) {
        throw ParseError(source, line_no, "expected two tab-separated fields, found more");
    }
    if (first.empty() || second.empty()) throw ParseError(source, line_no, "empty field");
    return {first, second};
}

}  // namespace detail

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto [a, b] = detail::split_record(line, source, line_no);
        records.emplace_back(std::string(a), std::string(b));
    }
    if (in.bad()) throw IoError(source + ": read failure after line " + std::to_string(line_no));
    return records;
}

std::uint64_t pair_key(ItemIndex a, ItemIndex b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

ProfileStore parse_profiles(std::istream& in, const std::string& source_name) {
    return ProfileStore::from_records(read_pairs(in, source_name));
}

CoocMatrix::CoocMatrix(std::size_t item_count, std::vector<CoocEntry> entries)
    : item_count_(item_count), entries_(std::move(entries)) {
    for (auto& e : entries_) {
        if (e.a == e.b) throw ContractError("co-occurrence matrix cannot hold diagonal entries");
        if (e.a > e.b) std::swap(e.a, e.b);
        if (e.b >= item_count_) throw ContractError("co-occurrence entry refers to an unknown item");
        if (e.count == 0) throw ContractError("co-occurrence counts must be >= 1");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const CoocEntry& x, const CoocEntry& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].a == entries_[i - 1].a && entries_[i].b == entries_[i - 1].b) {
            throw ContractError("duplicate co-occurrence pair");
        }
    }
}

std::uint32_t CoocMatrix::count(ItemIndex a, ItemIndex b) const {
    if (a == b) return 0;
    if (a > b) std::swap(a, b);
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{a, b},
                                     [](const CoocEntry& e, const std::pair<ItemIndex, ItemIndex>& key) {
                                         return std::tie(e.a, e.b) < std::tie(key.first, key.second);
                                     });
    if (it == entries_.end() || it->a != a || it->b != b) return 0;
    return it->count;
}

CoocMatrix count_cooccurrences(const ProfileStore& store) {
    const auto& users = store.users();
    if (users.empty()) throw EmptyInputError("profile store is empty");

    const std::size_t shards = std::min<std::size_t>(thread_count(), users.size());
    std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> partial(shards);
    parallel_for(shards, [&](std::size_t shard) {
        auto& counts = partial[shard];
        for (std::size_t u = shard; u < users.size(); u += shards) {
            const auto& items = users[u].items;
            for (std::size_t i = 0; i < items.size(); ++i) {
                for (std::size_t j = i + 1; j < items.size(); ++j) {
                    const auto [a, b] = std::minmax(items[i], items[j]);
                    ++counts[pair_key(a, b)];
                }
            }
        }
    });

    auto& merged = partial.front();
    for (std::size_t s = 1; s < shards; ++s) {
        for (const auto& [key, count] : partial[s]) merged[key] += count;
    }

    std::vector<CoocEntry> entries;
    entries.reserve(merged.size());
    for (const auto& [key, count] : merged) {
        entries.push_back(CoocEntry{static_cast<ItemIndex>(key >> 32), static_cast<ItemIndex>(key & 0xffffffffu), count});
    }
    return CoocMatrix(store.item_count(), std::move(entries));
}

std::string_view label_kind_name(LabelKind kind) { return kind == LabelKind::artist ? "artist" : "genre"; }

LabelKind parse_label_kind(std::string_view text) {
    if (text == "artist") return LabelKind::artist;
    if (text == "genre") return LabelKind::genre;
    throw ValidationError("label kind must be 'artist' or 'genre', got '" + std::string(text) + "'");
}

const std::vector<std::uint32_t>* LabelTable::find(std::string_view item_id) const {
    const auto it = labels.find(item_id);
    return it == labels.end() ? nullptr : &it->second;
}

LabelTable labels_from_records(const std::vector<std::pair<std::string, std::string>>& records, LabelKind kind) {
    LabelTable table;
    table.kind = kind;
    for (const auto& [item, label] : records) table.label_names.push_back(label);
    std::sort(table.label_names.begin(), table.label_names.end());
    table.label_names.erase(std::unique(table.label_names.begin(), table.label_names.end()), table.label_names.end());

    for (const auto& [item, label] : records) {
        const auto pos = std::lower_bound(table.label_names.begin(), table.label_names.end(), label);
        const auto idx = static_cast<std::uint32_t>(pos - table.label_names.begin());
        auto& list = table.labels[item];
        if (std::find(list.begin(), list.end(), idx) == list.end()) list.push_back(idx);
    }
    return table;
}

LabelTable parse_labels(std::istream& in, LabelKind kind, const std::string& source_name) {
    return labels_from_records(read_pairs(in, source_name), kind);
}

}  // namespace simmap
