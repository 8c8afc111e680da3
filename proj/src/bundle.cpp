#include "patmine/bundle.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "patmine/errors.hpp"
#include "patmine/features.hpp"

namespace patmine {

namespace {

constexpr std::string_view kMagic = "PATMINE-BUNDLE 1\n";

void put_entry(std::string& out, std::string_view name, std::string_view bytes) {
    out += "entry ";
    out += name;
    out += ' ';
    out += std::to_string(bytes.size());
    out += '\n';
    out += bytes;
    out += '\n';
}

std::map<std::string, std::string> split_entries(std::string_view archive) {
    if (archive.substr(0, kMagic.size()) != kMagic) throw BundleFormatError("bundle: bad magic line");
    std::map<std::string, std::string> entries;
    std::size_t pos = kMagic.size();
    while (pos < archive.size()) {
        const auto eol = archive.find('\n', pos);
        if (eol == std::string_view::npos) throw BundleFormatError("bundle: truncated entry header");
        std::istringstream header{std::string(archive.substr(pos, eol - pos))};
        std::string tag, name;
        std::size_t size = 0;
        if (!(header >> tag >> name >> size) || tag != "entry") {
            throw BundleFormatError("bundle: malformed entry header at byte " + std::to_string(pos));
        }
        const std::size_t begin = eol + 1;
        if (begin + size + 1 > archive.size() || archive[begin + size] != '\n') {
            throw BundleFormatError("bundle: entry '" + name + "' is truncated");
        }
        if (!entries.emplace(name, std::string(archive.substr(begin, size))).second) {
            throw BundleFormatError("bundle: duplicate entry '" + name + "'");
        }
        pos = begin + size + 1;
    }
    return entries;
}

const std::string& require(const std::map<std::string, std::string>& entries, const std::string& name) {
    const auto it = entries.find(name);
    if (it == entries.end()) throw BundleFormatError("bundle: missing entry '" + name + "'");
    return it->second;
}

}  // namespace

std::string write_bundle(const ModelBundle& bundle) {
    std::string out(kMagic);
    put_entry(out, "config",
              "ngram " + std::to_string(bundle.sslr.ngram) + "\nappend_numeric_features " +
                  (bundle.append_numeric_features ? "1" : "0") + "\n");
    std::string labels;
    for (auto label : bundle.ensemble.label_order()) {
        labels += to_string(label);
        labels += '\n';
    }
    put_entry(out, "labels", labels);
    put_entry(out, "embeddings", write_embeddings(bundle.embeddings));
    put_entry(out, "ensemble", bundle.ensemble.serialize());
    return out;
}

ModelBundle read_bundle(std::string_view archive) {
    const auto entries = split_entries(archive);
    ModelBundle bundle;

    std::istringstream config(require(entries, "config"));
    std::string key;
    int value = 0;
    bool saw_ngram = false, saw_numeric = false;
    while (config >> key >> value) {
        if (key == "ngram") {
            bundle.sslr.ngram = value;
            saw_ngram = true;
        } else if (key == "append_numeric_features") {
            bundle.append_numeric_features = value != 0;
            saw_numeric = true;
        } else {
            throw BundleFormatError("bundle: unknown config key '" + key + "'");
        }
    }
    if (!saw_ngram || !saw_numeric || bundle.sslr.ngram < 1) throw BundleFormatError("bundle: incomplete config");

    try {
        bundle.embeddings = read_embeddings(require(entries, "embeddings"));
    } catch (const BundleFormatError&) {
        throw;
    } catch (const Error& e) {
        throw BundleFormatError(std::string("bundle: ") + e.what());
    }
    bundle.ensemble = TreeEnsemble::deserialize(require(entries, "ensemble"));

    std::istringstream labels(require(entries, "labels"));
    std::vector<PatternLabel> order;
    std::string name;
    while (labels >> name) {
        const auto label = parse_label(name);
        if (!label) throw BundleFormatError("bundle: unknown label '" + name + "'");
        order.push_back(*label);
    }
    if (order != bundle.ensemble.label_order()) throw BundleFormatError("bundle: label list disagrees with ensemble");

    const std::size_t expected = bundle.embeddings.dim() + (bundle.append_numeric_features ? kNumericFeatureCount : 0);
    if (bundle.ensemble.dim() != expected) throw BundleFormatError("bundle: ensemble width does not match embeddings");
    return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write bundle " + path.string());
    out << write_bundle(bundle);
    if (!out) throw Error("failed writing bundle " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleFormatError("cannot open bundle " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_bundle(buf.str());
}

}  // namespace patmine
