#include "predelete/bundle.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "predelete/corpus.hpp"
#include "predelete/error.hpp"

namespace predelete {

namespace {

constexpr std::string_view kMagic = "predelete-bundle ";
constexpr std::string_view kTrailerTag = "CRC:";
constexpr std::uint8_t kFloatSection = 1;
constexpr std::uint8_t kStringSection = 2;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Writer {
 public:
  void header(std::string_view key, std::string_view value) {
    header_ += key;
    header_ += '=';
    header_ += escape_tsv(value);
    header_ += '\n';
  }
  void header(std::string_view key, bool value) { header(key, std::string_view(value ? "true" : "false")); }
  void header(std::string_view key, double value) { header(key, std::string_view(format_double(value))); }
  void header(std::string_view key, std::uint64_t value) { header(key, std::string_view(std::to_string(value))); }
  void header(std::string_view key, std::int64_t value) { header(key, std::string_view(std::to_string(value))); }

  void floats(std::string_view name, std::span<const double> values) {
    section_head(name, kFloatSection, values.size());
    for (double v : values) put_le(sections_, v);
  }
  void strings(std::string_view name, std::span<const std::string> values) {
    section_head(name, kStringSection, values.size());
    for (const auto& s : values) {
      put_le<std::uint64_t>(sections_, s.size());
      sections_ += s;
    }
  }

  std::string finish(int version) const {
    std::string out(kMagic);
    out += std::to_string(version);
    out += '\n';
    out += header_;
    out += '\n';
    out += sections_;
    const auto crc = crc_of(out);
    out += kTrailerTag;
    put_le(out, crc);
    return out;
  }

 private:
  void section_head(std::string_view name, std::uint8_t kind, std::size_t count) {
    put_le<std::uint32_t>(sections_, static_cast<std::uint32_t>(name.size()));
    sections_ += name;
    sections_.push_back(static_cast<char>(kind));
    put_le<std::uint64_t>(sections_, count);
  }

  std::string header_;
  std::string sections_;
};

[[noreturn]] void corrupt(const std::string& what) { throw ModelError("corrupt bundle: " + what); }

class Reader {
 public:
  explicit Reader(std::string_view body) : body_(body) {}

  std::map<std::string, std::string> read_header() {
    std::map<std::string, std::string> out;
    for (;;) {
      const auto nl = body_.find('\n', pos_);
      if (nl == std::string_view::npos) corrupt("unterminated header");
      const auto line = body_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      if (line.empty()) return out;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) corrupt("header line without '='");
      std::string key(line.substr(0, eq));
      std::string value;
      try {
        value = unescape_tsv(line.substr(eq + 1));
      } catch (const std::invalid_argument& e) {
        corrupt(e.what());
      }
      if (key == "label") {
        labels_.push_back(std::move(value));
        continue;
      }
      if (!out.emplace(std::move(key), std::move(value)).second) corrupt("repeated header key");
    }
  }

  void read_sections() {
    while (pos_ < body_.size()) {
      const auto name_len = get<std::uint32_t>();
      std::string name(take(name_len));
      const auto kind = static_cast<std::uint8_t>(take(1)[0]);
      const auto count = get<std::uint64_t>();
      if (kind == kFloatSection) {
        if (count > (body_.size() - pos_) / 8) corrupt("section '" + name + "' overruns the file");
        std::vector<double> values(count);
        for (auto& v : values) v = get<double>();
        floats_[name] = std::move(values);
      } else if (kind == kStringSection) {
        std::vector<std::string> values;
        for (std::uint64_t i = 0; i < count; ++i) {
          const auto len = get<std::uint64_t>();
          values.emplace_back(take(len));
        }
        strings_[name] = std::move(values);
      } else {
        corrupt("unknown section kind in '" + name + "'");
      }
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }

  const std::vector<double>& floats(const std::string& name) const {
    auto it = floats_.find(name);
    if (it == floats_.end()) corrupt("missing section '" + name + "'");
    return it->second;
  }
  const std::vector<std::string>& strings(const std::string& name) const {
    auto it = strings_.find(name);
    if (it == strings_.end()) corrupt("missing section '" + name + "'");
    return it->second;
  }

 private:
  std::string_view take(std::uint64_t n) {
    if (n > body_.size() - pos_) corrupt("unexpected end of data");
    auto s = body_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T get() {
    auto bytes = take(sizeof(T));
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }

  std::string_view body_;
  std::size_t pos_ = 0;
  std::vector<std::string> labels_;
  std::map<std::string, std::vector<double>> floats_;
  std::map<std::string, std::vector<std::string>> strings_;
};

class Header {
 public:
  explicit Header(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  const std::string& str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) corrupt("missing header key '" + key + "'");
    return it->second;
  }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  bool boolean(const std::string& key) const {
    const auto& v = str(key);
    if (v == "true") return true;
    if (v == "false") return false;
    corrupt("header key '" + key + "' is not a boolean");
  }
  std::uint64_t u64(const std::string& key) const {
    const auto& v = str(key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) corrupt("header key '" + key + "' is not an integer");
    return out;
  }
  std::int64_t i64(const std::string& key) const {
    const auto& v = str(key);
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) corrupt("header key '" + key + "' is not an integer");
    return out;
  }
  double real(const std::string& key) const {
    const auto& v = str(key);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) corrupt("header key '" + key + "' is not a number");
    return out;
  }
  const std::map<std::string, std::string>& all() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::size_t as_index(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 9007199254740992.0) corrupt(std::string("bad ") + what);
  return static_cast<std::size_t>(v);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void ModelBundle::validate() const {
  if (model_dimension(model) != vocabulary.size())
    throw ModelError("model dimension " + std::to_string(model_dimension(model)) +
                     " does not match vocabulary size " + std::to_string(vocabulary.size()));
  if (model_classes(model) != labels.size())
    throw ModelError("model has " + std::to_string(model_classes(model)) + " classes but the label map has " +
                     std::to_string(labels.size()));
  normalization.validate();
}

DocumentVector ModelBundle::featurize(std::string_view text) const {
  return vectorize(preprocess(text, normalization), vocabulary);
}

Prediction ModelBundle::predict_text(std::string_view text) const { return predict(model, featurize(text)); }

std::string serialize_bundle(const ModelBundle& bundle) {
  bundle.validate();
  Writer w;
  w.header("model", model_kind(bundle.model));
  if (bundle.setting) w.header("setting", to_string(*bundle.setting));
  for (const auto& name : bundle.labels.names()) w.header("label", std::string_view(name));

  const auto& n = bundle.normalization;
  w.header("norm.replace_urls", n.replace_urls);
  w.header("norm.replace_mentions", n.replace_mentions);
  w.header("norm.strip_hash_symbol", n.strip_hash_symbol);
  w.header("norm.strip_non_alphanumeric", n.strip_non_alphanumeric);
  w.header("norm.url_token", std::string_view(n.url_token));
  w.header("norm.user_token", std::string_view(n.user_token));
  w.header("norm.lowercase", n.lowercase);
  w.header("norm.normalize_arabic", n.normalize_arabic);

  const auto& vocab = bundle.vocabulary;
  w.header("vocab.min_df", std::uint64_t{vocab.options().min_df});
  if (vocab.options().max_features)
    w.header("vocab.max_features", std::uint64_t{*vocab.options().max_features});
  else
    w.header("vocab.max_features", std::string_view("none"));
  w.header("vocab.n_documents", vocab.n_documents());
  w.header("vocab.size", std::uint64_t{vocab.size()});
  w.header("model.dimension", std::uint64_t{model_dimension(bundle.model)});
  w.header("model.n_classes", std::uint64_t{model_classes(bundle.model)});

  std::vector<double> buf;
  if (const auto* maj = std::get_if<MajorityModel>(&bundle.model)) {
    w.header("majority.class", std::uint64_t{maj->majority_class});
  } else if (const auto* svm = std::get_if<LinearSvmModel>(&bundle.model)) {
    w.header("svm.lambda", svm->hp.lambda);
    w.header("svm.epochs", std::uint64_t{svm->hp.epochs});
    w.header("svm.seed", svm->hp.seed);
    w.header("svm.balanced", svm->hp.balanced_class_weights);
  } else {
    const auto& rf = std::get<ForestModel>(bundle.model);
    w.header("rf.n_trees", std::uint64_t{rf.hp.n_trees});
    w.header("rf.max_depth", std::uint64_t{rf.hp.max_depth});
    w.header("rf.max_features", std::uint64_t{rf.hp.max_features});
    w.header("rf.bootstrap", rf.hp.bootstrap);
    w.header("rf.seed", rf.hp.seed);
    w.header("rf.features_per_split", std::uint64_t{rf.features_per_split});
  }

  w.header("meta.corpus_fingerprint", std::string_view(bundle.metadata.corpus_fingerprint));
  w.header("meta.seed", bundle.metadata.seed);
  w.header("meta.timestamp", bundle.metadata.timestamp);
  for (const auto& [k, v] : bundle.metadata.extra) {
    if (k.empty() || k.find('=') != std::string::npos || k.find('\n') != std::string::npos)
      throw ModelError("invalid metadata key '" + k + "'");
    if (k == "corpus_fingerprint" || k == "seed" || k == "timestamp")
      throw ModelError("metadata key '" + k + "' is reserved");
    w.header("meta." + k, std::string_view(v));
  }

  w.strings("vocab.terms", vocab.terms());
  buf.assign(vocab.document_frequency().begin(), vocab.document_frequency().end());
  w.floats("vocab.df", buf);

  if (const auto* maj = std::get_if<MajorityModel>(&bundle.model)) {
    buf.assign(maj->class_counts.begin(), maj->class_counts.end());
    w.floats("majority.class_counts", buf);
  } else if (const auto* svm = std::get_if<LinearSvmModel>(&bundle.model)) {
    buf.clear();
    for (const auto& row : svm->weights) buf.insert(buf.end(), row.begin(), row.end());
    w.floats("svm.weights", buf);
    w.floats("svm.bias", svm->bias);
    buf.clear();
    for (const auto& row : svm->epoch_objective) buf.insert(buf.end(), row.begin(), row.end());
    w.floats("svm.objective", buf);
  } else {
    const auto& rf = std::get<ForestModel>(bundle.model);
    std::vector<double> sizes, nodes, leaf_sizes, leaves;
    for (const auto& tree : rf.trees) {
      sizes.push_back(static_cast<double>(tree.nodes.size()));
      for (const auto& node : tree.nodes) {
        nodes.push_back(node.feature);
        nodes.push_back(node.threshold);
        nodes.push_back(node.left);
        nodes.push_back(node.right);
        nodes.push_back(node.leaf);
      }
      leaf_sizes.push_back(static_cast<double>(tree.leaf_counts.size()));
      leaves.insert(leaves.end(), tree.leaf_counts.begin(), tree.leaf_counts.end());
    }
    w.floats("rf.tree_sizes", sizes);
    w.floats("rf.nodes", nodes);
    w.floats("rf.leaf_sizes", leaf_sizes);
    w.floats("rf.leaf_counts", leaves);
  }
  return w.finish(kBundleFormatVersion);
}

ModelBundle parse_bundle(std::string_view bytes) {
  const auto first_nl = bytes.find('\n');
  if (first_nl == std::string_view::npos) throw ChecksumError("bundle is truncated (no header line)");
  const auto magic_line = bytes.substr(0, first_nl);
  if (!magic_line.starts_with(kMagic)) throw ModelError("not a model bundle (bad magic line)");
  const auto version_text = magic_line.substr(kMagic.size());
  int version = 0;
  auto [p, ec] = std::from_chars(version_text.data(), version_text.data() + version_text.size(), version);
  if (ec != std::errc{} || p != version_text.data() + version_text.size())
    throw ModelError("bundle version field is not an integer");
  if (version != kBundleFormatVersion) throw VersionError(version, kBundleFormatVersion);

  const auto trailer_size = kTrailerTag.size() + sizeof(std::uint32_t);
  if (bytes.size() < first_nl + 1 + trailer_size) throw ChecksumError("bundle is truncated (no checksum trailer)");
  const auto body_end = bytes.size() - trailer_size;
  if (bytes.substr(body_end, kTrailerTag.size()) != kTrailerTag)
    throw ChecksumError("bundle checksum trailer missing (file truncated or corrupted)");
  unsigned char crc_bytes[4];
  std::memcpy(crc_bytes, bytes.data() + body_end + kTrailerTag.size(), 4);
  const std::uint32_t stored = crc_bytes[0] | (crc_bytes[1] << 8) | (crc_bytes[2] << 16) |
                               (static_cast<std::uint32_t>(crc_bytes[3]) << 24);
  if (stored != crc_of(bytes.substr(0, body_end)))
    throw ChecksumError("bundle checksum mismatch (file truncated or corrupted)");

  Reader reader(bytes.substr(first_nl + 1, body_end - first_nl - 1));
  Header h(reader.read_header());
  reader.read_sections();

  ModelBundle b;
  b.labels = LabelMap(reader.labels());
  if (h.has("setting")) {
    auto s = parse_setting(h.str("setting"));
    if (!s) corrupt("unknown setting '" + h.str("setting") + "'");
    b.setting = s;
  }

  auto& n = b.normalization;
  n.replace_urls = h.boolean("norm.replace_urls");
  n.replace_mentions = h.boolean("norm.replace_mentions");
  n.strip_hash_symbol = h.boolean("norm.strip_hash_symbol");
  n.strip_non_alphanumeric = h.boolean("norm.strip_non_alphanumeric");
  n.url_token = h.str("norm.url_token");
  n.user_token = h.str("norm.user_token");
  n.lowercase = h.boolean("norm.lowercase");
  n.normalize_arabic = h.boolean("norm.normalize_arabic");

  VocabularyOptions vopt;
  vopt.min_df = static_cast<std::uint32_t>(h.u64("vocab.min_df"));
  if (h.str("vocab.max_features") == "none")
    vopt.max_features.reset();
  else
    vopt.max_features = static_cast<std::uint32_t>(h.u64("vocab.max_features"));
  const auto& df_values = reader.floats("vocab.df");
  std::vector<std::uint64_t> df;
  df.reserve(df_values.size());
  for (double d : df_values) df.push_back(as_index(d, "document frequency"));
  b.vocabulary = Vocabulary(reader.strings("vocab.terms"), std::move(df), h.u64("vocab.n_documents"), vopt);
  if (b.vocabulary.size() != h.u64("vocab.size")) corrupt("vocabulary size mismatch");

  const auto dim = static_cast<std::size_t>(h.u64("model.dimension"));
  const auto classes = static_cast<std::size_t>(h.u64("model.n_classes"));
  const auto& kind = h.str("model");
  if (kind == "majority") {
    MajorityModel m;
    m.dimension = dim;
    m.majority_class = static_cast<std::size_t>(h.u64("majority.class"));
    for (double c : reader.floats("majority.class_counts")) m.class_counts.push_back(as_index(c, "class count"));
    if (m.class_counts.size() != classes || m.majority_class >= classes) corrupt("majority model shape");
    b.model = std::move(m);
  } else if (kind == "svm") {
    LinearSvmModel m;
    m.hp.lambda = h.real("svm.lambda");
    m.hp.epochs = static_cast<std::uint32_t>(h.u64("svm.epochs"));
    m.hp.seed = h.u64("svm.seed");
    m.hp.balanced_class_weights = h.boolean("svm.balanced");
    m.dimension = dim;
    m.n_classes = classes;
    const std::size_t separators = classes == 2 ? 1 : classes;
    const auto& w = reader.floats("svm.weights");
    const auto& bias = reader.floats("svm.bias");
    const auto& obj = reader.floats("svm.objective");
    if (w.size() != separators * dim || bias.size() != separators ||
        (!obj.empty() && obj.size() != separators * m.hp.epochs))
      corrupt("svm section sizes");
    for (std::size_t s = 0; s < separators; ++s) {
      m.weights.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(s * dim),
                             w.begin() + static_cast<std::ptrdiff_t>((s + 1) * dim));
      // Hand-built separators carry no training history.
      if (obj.empty()) m.epoch_objective.emplace_back();
      else
        m.epoch_objective.emplace_back(obj.begin() + static_cast<std::ptrdiff_t>(s * m.hp.epochs),
                                       obj.begin() + static_cast<std::ptrdiff_t>((s + 1) * m.hp.epochs));
    }
    m.bias = bias;
    b.model = std::move(m);
  } else if (kind == "rf") {
    ForestModel m;
    m.hp.n_trees = static_cast<std::uint32_t>(h.u64("rf.n_trees"));
    m.hp.max_depth = static_cast<std::uint32_t>(h.u64("rf.max_depth"));
    m.hp.max_features = static_cast<std::uint32_t>(h.u64("rf.max_features"));
    m.hp.bootstrap = h.boolean("rf.bootstrap");
    m.hp.seed = h.u64("rf.seed");
    m.features_per_split = static_cast<std::uint32_t>(h.u64("rf.features_per_split"));
    m.dimension = dim;
    m.n_classes = classes;
    const auto& sizes = reader.floats("rf.tree_sizes");
    const auto& nodes = reader.floats("rf.nodes");
    const auto& leaf_sizes = reader.floats("rf.leaf_sizes");
    const auto& leaves = reader.floats("rf.leaf_counts");
    if (sizes.size() != m.hp.n_trees || leaf_sizes.size() != m.hp.n_trees || classes == 0) corrupt("forest shape");
    std::size_t node_pos = 0;
    std::size_t leaf_pos = 0;
    for (std::size_t t = 0; t < sizes.size(); ++t) {
      DecisionTree tree;
      const auto n_nodes = as_index(sizes[t], "tree size");
      const auto n_leaf_values = as_index(leaf_sizes[t], "leaf size");
      if (n_nodes == 0 || (nodes.size() - node_pos) / 5 < n_nodes || leaves.size() - leaf_pos < n_leaf_values ||
          n_leaf_values % classes != 0)
        corrupt("forest section sizes");
      for (std::size_t k = 0; k < n_nodes; ++k, node_pos += 5) {
        TreeNode node;
        const double feature = nodes[node_pos];
        node.feature = feature < 0 ? -1 : static_cast<std::int32_t>(as_index(feature, "node feature"));
        node.threshold = nodes[node_pos + 1];
        node.left = static_cast<std::uint32_t>(as_index(nodes[node_pos + 2], "node child"));
        node.right = static_cast<std::uint32_t>(as_index(nodes[node_pos + 3], "node child"));
        node.leaf = static_cast<std::uint32_t>(as_index(nodes[node_pos + 4], "leaf ordinal"));
        if (node.feature >= 0 && (static_cast<std::size_t>(node.feature) >= dim || node.left >= n_nodes ||
                                  node.right >= n_nodes || node.left <= k || node.right <= k))
          corrupt("forest node references");
        if (node.feature < 0 && (node.leaf + 1) * classes > n_leaf_values) corrupt("forest leaf reference");
        tree.nodes.push_back(node);
      }
      tree.leaf_counts.assign(leaves.begin() + static_cast<std::ptrdiff_t>(leaf_pos),
                              leaves.begin() + static_cast<std::ptrdiff_t>(leaf_pos + n_leaf_values));
      leaf_pos += n_leaf_values;
      m.trees.push_back(std::move(tree));
    }
    if (node_pos != nodes.size() || leaf_pos != leaves.size()) corrupt("trailing forest data");
    b.model = std::move(m);
  } else {
    corrupt("unknown model kind '" + kind + "'");
  }

  b.metadata.corpus_fingerprint = h.str("meta.corpus_fingerprint");
  b.metadata.seed = h.u64("meta.seed");
  b.metadata.timestamp = h.i64("meta.timestamp");
  for (const auto& [k, v] : h.all())
    if (k.starts_with("meta.") && k != "meta.corpus_fingerprint" && k != "meta.seed" && k != "meta.timestamp")
      b.metadata.extra[k.substr(5)] = v;

  try {
    b.validate();
  } catch (const UsageError& e) {
    corrupt(e.what());
  }
  b.fingerprint = hex64(fnv1a64(bytes));
  return b;
}

std::string save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write bundle " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelError("failed writing bundle " + path.string());
  return hex64(fnv1a64(bytes));
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open bundle " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bundle(buf.str());
}

}  // namespace predelete
