#include "patmine/sslr.hpp"

#include <sstream>

#include "patmine/errors.hpp"

namespace patmine {

namespace {

// U+00C0..U+00FF folded to ASCII; empty entries are not letters.
constexpr std::string_view kLatin1Fold[64] = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "y",
};

/// ASCII-only rendering; non-letters outside ASCII become ' '.
std::string transliterate(std::string_view in) {
    std::string out;
    for (std::size_t i = 0; i < in.size();) {
        const auto c = static_cast<unsigned char>(in[i]);
        if (c < 0x80) {
            out += static_cast<char>(c);
            ++i;
            continue;
        }
        std::size_t len = 1;
        unsigned cp = 0;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        }
        for (std::size_t k = 1; k < len && i + k < in.size(); ++k) {
            cp = (cp << 6) | (static_cast<unsigned char>(in[i + k]) & 0x3F);
        }
        i += len;
        if (cp >= 0xC0 && cp <= 0xFF && !kLatin1Fold[cp - 0xC0].empty()) {
            std::string folded(kLatin1Fold[cp - 0xC0]);
            // Keep the case so camel boundaries survive.
            if (cp < 0xE0 && cp != 0xDF) folded[0] = static_cast<char>(folded[0] - 'a' + 'A');
            out += folded;
        } else {
            out += ' ';
        }
    }
    return out;
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_letter(char c) { return is_upper(c) || is_lower(c); }

void split_letters(std::string_view run, std::vector<std::string>& out) {
    std::string cur;
    for (std::size_t i = 0; i < run.size(); ++i) {
        const char c = run[i];
        if (i > 0 && !cur.empty()) {
            const char prev = run[i - 1];
            const bool camel = is_lower(prev) && is_upper(c);
            const bool acronym_end = is_upper(prev) && is_upper(c) && i + 1 < run.size() && is_lower(run[i + 1]);
            if (camel || acronym_end) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        }
        cur += is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
    }
    if (!cur.empty()) out.push_back(std::move(cur));
}

void append_tokens(Sentence& sentence, std::string_view id) {
    for (auto& t : split_identifier(id)) sentence.push_back(std::move(t));
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view id) {
    const std::string ascii = transliterate(id);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < ascii.size()) {
        if (!is_letter(ascii[i])) {
            ++i;
            continue;
        }
        const auto begin = i;
        while (i < ascii.size() && is_letter(ascii[i])) ++i;
        split_letters(std::string_view(ascii).substr(begin, i - begin), out);
    }
    return out;
}

SslrDocument emit_sslr(const ParsedFile& file, const std::vector<ClassFeatures>& features,
                       const SslrOptions& options) {
    SslrDocument doc;
    doc.source = file.file;
    for (std::size_t c = 0; c < file.classes.size() && c < features.size(); ++c) {
        const ClassModel& cls = file.classes[c];
        const ClassFeatures& cf = features[c];

        Sentence head{"class"};
        append_tokens(head, cf.record.class_name);
        for (auto m : cf.record.class_modifiers.names()) head.emplace_back(m);
        if (cls.extends_name) {
            head.emplace_back("extends");
            append_tokens(head, *cls.extends_name);
        }
        if (!cls.implements_names.empty()) {
            head.emplace_back("implements");
            for (const auto& name : cls.implements_names) append_tokens(head, name);
        }
        doc.sentences.push_back(std::move(head));

        for (const auto& m : cf.methods) {
            Sentence s{"method"};
            append_tokens(s, m.method_name);
            s.emplace_back("returns");
            append_tokens(s, m.return_type);
            s.emplace_back("params");
            for (const auto& p : m.method_params) append_tokens(s, p.name);
            if (!m.incoming_names.empty()) {
                s.emplace_back("calls");
                for (const auto& n : m.incoming_names) append_tokens(s, n);
            }
            if (!m.outgoing_names.empty()) {
                s.emplace_back("calledby");
                for (const auto& n : m.outgoing_names) append_tokens(s, n);
            }
            for (std::size_t k = 0; k < kStatementKindCount; ++k) {
                for (std::size_t rep = 0; rep < m.body_line_types[k]; ++rep) {
                    append_tokens(s, to_string(static_cast<StatementKind>(k)));
                }
            }
            doc.sentences.push_back(std::move(s));
        }
    }
    if (options.ngram >= 2) {
        for (auto& s : doc.sentences) {
            const auto n = s.size();
            for (std::size_t i = 0; i + 1 < n; ++i) s.push_back(s[i] + s[i + 1]);
        }
    }
    return doc;
}

std::string write_sslr(const std::vector<SslrDocument>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        out += "## file " + doc.source.project_id + "/" + doc.source.path + "\n";
        for (const auto& s : doc.sentences) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i) out += ' ';
                out += s[i];
            }
            out += '\n';
        }
    }
    return out;
}

std::vector<SslrDocument> read_sslr(std::string_view text) {
    static constexpr std::string_view kHeader = "## file ";
    std::vector<SslrDocument> docs;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind(kHeader, 0) == 0) {
            const auto id = line.substr(kHeader.size());
            const auto slash = id.find('/');
            if (slash == std::string::npos) {
                throw Error("SSLR line " + std::to_string(lineno) + ": malformed file header");
            }
            docs.push_back({{id.substr(0, slash), id.substr(slash + 1)}, {}});
            continue;
        }
        if (docs.empty()) throw Error("SSLR line " + std::to_string(lineno) + ": sentence before file header");
        Sentence s;
        std::istringstream words(line);
        std::string w;
        while (words >> w) s.push_back(w);
        docs.back().sentences.push_back(std::move(s));
    }
    return docs;
}

}  // namespace patmine
