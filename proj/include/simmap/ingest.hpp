#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simmap {

using ItemIndex = std::uint32_t;

/// Items known to a dataset with their occurrence counts |A| (number of
/// users whose profile contains the item). Item ids are sorted
/// lexicographically, so the dense index order equals id order.
struct ItemTable {
    std::vector<std::string> ids;
    std::vector<std::uint32_t> occurrences;

    std::size_t size() const noexcept { return ids.size(); }
    std::optional<ItemIndex> find(std::string_view id) const;
};

struct UserProfile {
    std::string user_id;
    std::vector<ItemIndex> items;  // distinct, in first-seen order
};

/// Users' item sets plus per-item occurrence counts. Immutable after
/// construction.
class ProfileStore {
public:
    /// Groups (user, item) records. Duplicate items within a user collapse.
    /// Throws EmptyInputError on an empty record list.
    static ProfileStore from_records(const std::vector<std::pair<std::string, std::string>>& records);

    const std::vector<UserProfile>& users() const noexcept { return users_; }
    const ItemTable& items() const noexcept { return items_; }
    std::size_t item_count() const noexcept { return items_.size(); }
    std::size_t user_count() const noexcept { return users_.size(); }

private:
    std::vector<UserProfile> users_;  // sorted by user id
    ItemTable items_;
};

/// Reads `user_id<TAB>item_id` lines. Blank lines are skipped; anything else
/// that is not exactly two non-empty tab-separated fields is a ParseError.
ProfileStore parse_profiles(std::istream& in, const std::string& source_name = "<profiles>");

struct CoocEntry {
    ItemIndex a;  // a < b
    ItemIndex b;
    std::uint32_t count;
    friend bool operator==(const CoocEntry&, const CoocEntry&) = default;
};

/// Sparse symmetric item-pair co-occurrence counts; only pairs with a
/// count >= 1 are stored, sorted by (a, b).
class CoocMatrix {
public:
    CoocMatrix() = default;
    /// Validates and sorts; throws ContractError on a diagonal, zero count or
    /// out-of-range index, or duplicate pair.
    CoocMatrix(std::size_t item_count, std::vector<CoocEntry> entries);

    std::size_t item_count() const noexcept { return item_count_; }
    const std::vector<CoocEntry>& entries() const noexcept { return entries_; }
    /// 0 when the pair never co-occurs (including a == b).
    std::uint32_t count(ItemIndex a, ItemIndex b) const;

    friend bool operator==(const CoocMatrix&, const CoocMatrix&) = default;

private:
    std::size_t item_count_ = 0;
    std::vector<CoocEntry> entries_;
};

/// Each user contributes 1 to every unordered pair of distinct items in its
/// profile. Shards users across workers; the merge is order-independent.
CoocMatrix count_cooccurrences(const ProfileStore& store);

enum class LabelKind { artist, genre };

std::string_view label_kind_name(LabelKind kind);
LabelKind parse_label_kind(std::string_view text);

/// item id -> one or more label indices. Label ids are sorted, and the
/// display name of a label is its id.
struct LabelTable {
    LabelKind kind = LabelKind::genre;
    std::map<std::string, std::vector<std::uint32_t>, std::less<>> labels;
    std::vector<std::string> label_names;

    std::size_t label_count() const noexcept { return label_names.size(); }
    /// nullptr when the item is unlabeled.
    const std::vector<std::uint32_t>* find(std::string_view item_id) const;
};

LabelTable labels_from_records(const std::vector<std::pair<std::string, std::string>>& records, LabelKind kind);

/// Reads `item_id<TAB>label_id` lines; an empty stream yields an empty table.
LabelTable parse_labels(std::istream& in, LabelKind kind, const std::string& source_name = "<labels>");

namespace detail {
/// Splits one line into exactly two non-empty tab-separated fields, or
/// throws ParseError.
std::pair<std::string_view, std::string_view> split_record(std::string_view line, const std::string& source,
                                                           std::size_t line_no);
}  // namespace detail

}  // namespace simmap
