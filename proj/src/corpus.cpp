#include "ngf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ngf/error.hpp"

namespace ngf {

using nlohmann::json;

void Corpus::add_item(ItemRecord item) {
  if (item.id.empty()) throw DataError("item with empty id");
  if (index_.count(item.id)) throw DataError("duplicate item id '" + item.id + "'");
  if (item.category.empty()) throw DataError("item '" + item.id + "' has no category");
  if (item.embedding.size() != dim_) {
    throw DataError("item '" + item.id + "' has embedding of length " + std::to_string(item.embedding.size()) +
                    ", corpus dim is " + std::to_string(dim_));
  }
  for (double v : item.embedding) {
    if (!std::isfinite(v)) throw DataError("item '" + item.id + "' has a non-finite embedding value");
  }
  index_.emplace(item.id, items_.size());
  items_.push_back(std::move(item));
}

void Corpus::add_outfit(Outfit outfit) {
  if (outfit.label != 0 && outfit.label != 1) {
    throw DataError("outfit '" + outfit.id + "' has label " + std::to_string(outfit.label) + " (expected 0 or 1)");
  }
  if (outfit.items.size() < 2) throw DataError("outfit '" + outfit.id + "' has fewer than two items");
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> cats;
  for (const auto& id : outfit.items) {
    const ItemRecord* it = find_item(id);
    if (!it) throw DataError("outfit '" + outfit.id + "' references unknown item '" + id + "'");
    if (!seen.insert(id).second) throw DataError("outfit '" + outfit.id + "' lists item '" + id + "' twice");
    if (outfit.compatible() && !cats.insert(it->category).second) {
      throw DataError("compatible outfit '" + outfit.id + "' has two items of category '" + it->category + "'");
    }
  }
  outfits_.push_back(std::move(outfit));
}

const ItemRecord* Corpus::find_item(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

const ItemRecord& Corpus::item(std::string_view id) const {
  const ItemRecord* it = find_item(id);
  if (!it) throw DataError("unknown item '" + std::string(id) + "'");
  return *it;
}

std::vector<const ItemRecord*> Corpus::resolve(const Outfit& outfit) const {
  std::vector<const ItemRecord*> out;
  out.reserve(outfit.items.size());
  for (const auto& id : outfit.items) out.push_back(&item(id));
  return out;
}

std::vector<std::string> Corpus::categories() const {
  std::set<std::string> cats;
  for (const auto& it : items_) cats.insert(it.category);
  return {cats.begin(), cats.end()};
}

std::vector<const ItemRecord*> Corpus::items_of(std::string_view category) const {
  std::vector<const ItemRecord*> out;
  for (const auto& it : items_) {
    if (it.category == category) out.push_back(&it);
  }
  return out;
}

std::size_t Corpus::count_label(int label) const {
  return static_cast<std::size_t>(
      std::count_if(outfits_.begin(), outfits_.end(), [label](const Outfit& o) { return o.label == label; }));
}

bool items_disjoint(const Corpus& a, const Corpus& b) {
  for (const auto& it : a.items()) {
    if (b.find_item(it.id)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw DataError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw DataError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

json corpus_to_json(const Corpus& corpus) {
  json items = json::array();
  for (const auto& it : corpus.items()) {
    json j = {{"id", it.id}, {"category", it.category}, {"embedding", it.embedding}};
    if (it.color) {
      j["color"] = {{"h", it.color->hue}, {"s", it.color->saturation}, {"v", it.color->value}};
    } else {
      j["color"] = nullptr;
    }
    items.push_back(std::move(j));
  }
  json outfits = json::array();
  for (const auto& o : corpus.outfits()) {
    json j = {{"id", o.id}, {"items", o.items}, {"label", o.label}};
    j["style"] = o.style ? json(std::string(to_string(*o.style))) : json(nullptr);
    outfits.push_back(std::move(j));
  }
  return {{"dim", corpus.dim()}, {"items", std::move(items)}, {"outfits", std::move(outfits)},
          {"split_disjoint", corpus.split_disjoint()}};
}

Corpus corpus_from_json(const json& j) {
  check_keys(j, {"dim", "items", "outfits", "split_disjoint"}, "corpus");
  const auto dim = get_field<std::int64_t>(j, "dim", "corpus");
  if (dim <= 0) throw DataError("corpus: dim must be positive");
  Corpus corpus(static_cast<std::size_t>(dim), j.contains("split_disjoint") ? get_field<bool>(j, "split_disjoint", "corpus") : false);
  if (!j.contains("items") || !j["items"].is_array()) throw DataError("corpus: 'items' must be an array");
  std::size_t k = 0;
  for (const auto& ji : j["items"]) {
    const std::string where = "items[" + std::to_string(k++) + "]";
    check_keys(ji, {"id", "category", "embedding", "color"}, where);
    ItemRecord it;
    it.id = get_field<std::string>(ji, "id", where);
    it.category = get_field<std::string>(ji, "category", where);
    it.embedding = get_field<std::vector<double>>(ji, "embedding", where + " ('" + it.id + "')");
    if (ji.contains("color") && !ji["color"].is_null()) {
      const auto& jc = ji["color"];
      check_keys(jc, {"h", "s", "v"}, where + ".color");
      it.color = make_color(get_field<double>(jc, "h", where), get_field<double>(jc, "s", where),
                            get_field<double>(jc, "v", where));
    }
    corpus.add_item(std::move(it));
  }
  if (!j.contains("outfits") || !j["outfits"].is_array()) throw DataError("corpus: 'outfits' must be an array");
  k = 0;
  for (const auto& jo : j["outfits"]) {
    const std::string where = "outfits[" + std::to_string(k++) + "]";
    check_keys(jo, {"id", "items", "label", "style"}, where);
    Outfit o;
    o.id = get_field<std::string>(jo, "id", where);
    o.items = get_field<std::vector<std::string>>(jo, "items", where);
    o.label = get_field<int>(jo, "label", where);
    if (jo.contains("style") && !jo["style"].is_null()) o.style = parse_style(get_field<std::string>(jo, "style", where));
    corpus.add_outfit(std::move(o));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open corpus " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw DataError("corpus " + path.string() + " is not valid JSON: " + e.what());
  }
  return corpus_from_json(j);
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write corpus " + path.string());
  f << corpus_to_json(corpus).dump() << '\n';
}

}  // namespace ngf
