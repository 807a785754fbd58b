#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "csi/errors.hpp"
#include "csi/rng.hpp"
#include "csi/text.hpp"

namespace csi {

enum class Language { EN, ZH };

inline std::string to_string(Language lang) { return lang == Language::EN ? "EN" : "ZH"; }

inline Language language_from_string(std::string_view s) {
    if (s == "EN" || s == "en") return Language::EN;
    if (s == "ZH" || s == "zh") return Language::ZH;
    throw ConfigError("unknown language '" + std::string(s) + "' (expected EN or ZH)");
}

enum class Pos { NOUN, VERB, OTHER };

inline std::string to_string(Pos pos) {
    switch (pos) {
        case Pos::NOUN: return "NOUN";
        case Pos::VERB: return "VERB";
        default: return "OTHER";
    }
}

struct TaggedToken {
    std::string surface;
    Pos pos = Pos::OTHER;
    Language language = Language::EN;
};

struct InventoryEntry {
    std::string word;
    Pos pos = Pos::NOUN;  // always NOUN or VERB in a built inventory
    std::uint64_t frequency = 0;
    std::uint32_t rank = 0;  // 1 = most frequent

    friend bool operator==(const InventoryEntry&, const InventoryEntry&) = default;
};

struct Inventory {
    Language language = Language::EN;
    std::vector<InventoryEntry> entries;
    std::string source_digest;

    std::size_t size() const { return entries.size(); }

    friend bool operator==(const Inventory&, const Inventory&) = default;
};

// Exact multiset counts of NOUN/VERB surface forms. Ordered map keeps every
// downstream traversal deterministic.
struct FrequencyTable {
    Language language = Language::EN;
    std::map<std::pair<std::string, Pos>, std::uint64_t> counts;
    std::string source_digest;
};

namespace detail {

inline Pos pos_from_string(std::string_view s, std::size_t line) {
    if (s == "NOUN") return Pos::NOUN;
    if (s == "VERB") return Pos::VERB;
    if (s == "OTHER") return Pos::OTHER;
    throw ParseError("unknown POS tag '" + std::string(s) + "'", line);
}

inline std::string canonical_token_line(const TaggedToken& token) {
    return token.surface + "\t" + to_string(token.pos) + "\t" + to_string(token.language) + "\n";
}

}  // namespace detail

// Counts NOUN/VERB tokens; OTHER tokens contribute nothing. The digest covers
// the canonical serialization of the stream in the order received, so a saved
// inventory records which token stream produced it.
template <typename TokenRange>
FrequencyTable ingest_tokens(const TokenRange& stream, Language language) {
    FrequencyTable table;
    table.language = language;
    std::uint64_t digest = 0xCBF29CE484222325ULL;
    bool any = false;
    for (const TaggedToken& token : stream) {
        any = true;
        if (token.language != language)
            throw ConfigError("token '" + token.surface + "' tagged " + to_string(token.language) +
                              " in a " + to_string(language) + " stream");
        std::string_view surface = text::trim(token.surface);
        for (unsigned char c : detail::canonical_token_line(token)) {
            digest ^= c;
            digest *= 0x100000001B3ULL;
        }
        if (token.pos == Pos::OTHER || surface.empty()) continue;
        ++table.counts[{std::string(surface), token.pos}];
    }
    if (!any) throw EmptyCorpus();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    table.source_digest = buf;
    return table;
}

// Parses the line-oriented token-stream format: surface<TAB>pos<TAB>lang.
// Blank lines are skipped; anything else malformed raises ParseError.
inline std::vector<TaggedToken> parse_token_stream(std::istream& in) {
    std::vector<TaggedToken> tokens;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, "\t");
        if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", lineno);
        TaggedToken token;
        token.surface = std::string(text::trim(fields[0]));
        if (token.surface.empty()) throw ParseError("empty token surface", lineno);
        token.pos = detail::pos_from_string(text::trim(fields[1]), lineno);
        std::string_view lang = text::trim(fields[2]);
        if (lang == "EN")
            token.language = Language::EN;
        else if (lang == "ZH")
            token.language = Language::ZH;
        else
            throw ParseError("unknown language tag '" + std::string(lang) + "'", lineno);
        tokens.push_back(std::move(token));
    }
    return tokens;
}

inline std::vector<TaggedToken> load_token_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open token stream: " + path);
    return parse_token_stream(in);
}

// Adds `shard` counts into `total` (deterministic merge for sharded ingestion).
inline void merge_frequency_tables(FrequencyTable& total, const FrequencyTable& shard) {
    if (total.language != shard.language)
        throw ConfigError("cannot merge frequency tables of different languages");
    for (const auto& [key, count] : shard.counts) total.counts[key] += count;
    total.source_digest += shard.source_digest;
}

namespace detail {

struct MergedWord {
    std::string surface;       // representative surface form
    Pos pos = Pos::NOUN;       // dominant POS
    std::uint64_t total = 0;   // combined count over surfaces and POS readings
};

// Groups (surface, pos) counts into one candidate per word. EN groups
// case-insensitively and keeps the most frequent surface; ZH groups by exact
// surface. A word with both readings keeps the higher-count POS (NOUN on tie).
inline std::vector<MergedWord> merge_counts(const FrequencyTable& table) {
    struct Group {
        std::map<std::string, std::uint64_t> by_surface;
        std::uint64_t noun = 0;
        std::uint64_t verb = 0;
    };
    std::map<std::string, Group> groups;
    for (const auto& [key, count] : table.counts) {
        const auto& [surface, pos] = key;
        std::string group_key =
            table.language == Language::EN ? text::fold_ascii(surface) : surface;
        Group& g = groups[group_key];
        g.by_surface[surface] += count;
        (pos == Pos::NOUN ? g.noun : g.verb) += count;
    }
    std::vector<MergedWord> merged;
    merged.reserve(groups.size());
    for (auto& [key, g] : groups) {
        MergedWord w;
        w.total = g.noun + g.verb;
        w.pos = g.verb > g.noun ? Pos::VERB : Pos::NOUN;
        std::uint64_t best = 0;
        for (const auto& [surface, count] : g.by_surface) {
            if (count > best) {  // map order makes ties resolve lexicographically
                best = count;
                w.surface = surface;
            }
        }
        merged.push_back(std::move(w));
    }
    return merged;
}

}  // namespace detail

// Selects the target_size most frequent words, ties broken by lexicographic
// order of the word, and assigns ranks 1..target_size.
inline Inventory build_inventory(const FrequencyTable& table, Language language,
                                 std::size_t target_size) {
    if (target_size < 1) throw ConfigError("target_size must be >= 1");
    if (table.language != language)
        throw ConfigError("frequency table language does not match requested language");
    auto merged = detail::merge_counts(table);
    if (target_size > merged.size()) throw ShortCorpus(target_size, merged.size());
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.surface < b.surface;
    });
    Inventory inv;
    inv.language = language;
    inv.source_digest = table.source_digest;
    inv.entries.reserve(target_size);
    for (std::size_t i = 0; i < target_size; ++i) {
        inv.entries.push_back({merged[i].surface, merged[i].pos, merged[i].total,
                               static_cast<std::uint32_t>(i + 1)});
    }
    return inv;
}

// ---- inventory file format ---------------------------------------------
//
//   #csi-inventory<TAB>language=EN<TAB>size=5000<TAB>source_digest=<hex>
//   word<TAB>pos<TAB>frequency<TAB>rank<TAB>language     (one per entry)

inline std::string serialize_inventory(const Inventory& inv) {
    std::string out = "#csi-inventory\tlanguage=" + to_string(inv.language) +
                      "\tsize=" + std::to_string(inv.size()) +
                      "\tsource_digest=" + inv.source_digest + "\n";
    for (const auto& e : inv.entries) {
        out += e.word;
        out += '\t';
        out += to_string(e.pos);
        out += '\t';
        out += std::to_string(e.frequency);
        out += '\t';
        out += std::to_string(e.rank);
        out += '\t';
        out += to_string(inv.language);
        out += '\n';
    }
    return out;
}

inline void save_inventory(const Inventory& inv, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write inventory: " + path);
    out << serialize_inventory(inv);
    if (!out) throw Error("write failed: " + path);
}

inline Inventory parse_inventory(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("missing inventory header", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = text::split(line, "\t");
    if (header.size() != 4 || header[0] != "#csi-inventory")
        throw ParseError("malformed inventory header", lineno);
    auto field = [&](std::size_t idx, std::string_view name) -> std::string {
        std::string_view f = header[idx];
        std::string prefix = std::string(name) + "=";
        if (!text::starts_with(f, prefix))
            throw ParseError("expected '" + prefix + "...' in header", 1);
        return std::string(f.substr(prefix.size()));
    };
    Inventory inv;
    std::string lang_str = field(1, "language");
    if (lang_str == "EN")
        inv.language = Language::EN;
    else if (lang_str == "ZH")
        inv.language = Language::ZH;
    else
        throw ParseError("unknown language '" + lang_str + "'", 1);
    std::size_t declared_size = 0;
    try {
        declared_size = std::stoull(field(2, "size"));
    } catch (const std::exception&) {
        throw ParseError("size is not a number", 1);
    }
    inv.source_digest = field(3, "source_digest");

    std::map<std::string, bool> seen;
    std::uint64_t prev_freq = UINT64_MAX;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = text::split(line, "\t");
        if (fields.size() != 5) throw ParseError("expected 5 tab-separated fields", lineno);
        InventoryEntry e;
        e.word = fields[0];
        if (e.word.empty()) throw ParseError("empty word", lineno);
        Pos pos = detail::pos_from_string(fields[1], lineno);
        if (pos == Pos::OTHER) throw ParseError("inventory entries must be NOUN or VERB", lineno);
        e.pos = pos;
        try {
            e.frequency = std::stoull(fields[2]);
            e.rank = static_cast<std::uint32_t>(std::stoul(fields[3]));
        } catch (const std::exception&) {
            throw ParseError("frequency/rank is not a number", lineno);
        }
        if (fields[4] != lang_str) throw ParseError("entry language differs from header", lineno);
        if (seen.count(e.word)) throw ParseError("duplicate word '" + e.word + "'", lineno);
        seen[e.word] = true;
        if (e.rank != inv.entries.size() + 1)
            throw ParseError("ranks must be contiguous from 1", lineno);
        if (e.frequency > prev_freq)
            throw ParseError("frequency must be non-increasing with rank", lineno);
        prev_freq = e.frequency;
        inv.entries.push_back(std::move(e));
    }
    if (inv.entries.size() != declared_size)
        throw ParseError("header size " + std::to_string(declared_size) + " != entry count " +
                             std::to_string(inv.entries.size()),
                         lineno);
    return inv;
}

inline Inventory load_inventory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open inventory: " + path);
    return parse_inventory(in);
}

inline std::vector<std::string> inventory_words(const Inventory& inv) {
    std::vector<std::string> words;
    words.reserve(inv.size());
    for (const auto& e : inv.entries) words.push_back(e.word);
    return words;
}

}  // namespace csi
