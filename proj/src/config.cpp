#include "ivafuse/config.hpp"

#include "ivafuse/dataio.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace ivafuse {

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : (base / path).lexically_normal();
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: " + key + " must be a boolean, got \"" + v + "\"");
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return fallback;
  if constexpr (std::is_same_v<T, std::string>) {
    return *raw;
  } else {
    const auto v = tree.get_optional<T>(key);
    if (!v) throw Error("config: bad value for " + key + ": \"" + *raw + "\"");
    return *v;
  }
}

std::vector<double> doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw Error("config: " + key + " has non-numeric entry \"" + s + "\"");
    }
  }
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(dataio::format_double(x));
  return join(s);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }

  static const std::vector<std::pair<std::string, std::vector<std::string>>> kKnown{
      {"run", {"seed", "out", "mode", "jobs"}},
      {"data", {"tables", "smiles", "xyz", "labels", "property", "subsample", "dmax"}},
      {"fusion", {"order", "whiten"}},
      {"iva", {"step_size", "max_iters", "tol", "init", "restarts"}},
      {"cv", {"folds", "repeats", "train", "validation", "test", "sigma_scales", "lambda_grid", "median_cap"}},
      {"curve", {"sizes"}},
      {"sweep", {"k"}},
      {"bench", {"K", "P", "N", "rho", "cond_bound", "seeds", "modes", "independent_slices"}},
  };
  for (const auto& [section, body] : tree) {
    const auto it = std::find_if(kKnown.begin(), kKnown.end(), [&](const auto& s) { return s.first == section; });
    if (it == kKnown.end()) throw Error("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw Error("config: unknown key " + section + "." + key);
      }
    }
  }

  RunConfig c;
  c.seed = get<std::uint64_t>(tree, "run.seed", 0);
  c.out = resolve(base_dir, get<std::string>(tree, "run.out", "out"));
  c.jobs = get<int>(tree, "run.jobs", 0);

  for (const auto& item : split_list(get<std::string>(tree, "data.tables", ""))) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) throw Error("config: data.tables entries must be name:path");
    c.tables.push_back({item.substr(0, colon), resolve(base_dir, item.substr(colon + 1))});
  }
  c.smiles = resolve(base_dir, get<std::string>(tree, "data.smiles", ""));
  c.xyz = resolve(base_dir, get<std::string>(tree, "data.xyz", ""));
  c.labels = resolve(base_dir, get<std::string>(tree, "data.labels", ""));
  c.property = get<std::string>(tree, "data.property", "");
  c.subsample = get<Index>(tree, "data.subsample", 0);
  c.dmax = get<Index>(tree, "data.dmax", 0);

  c.fusion.order = get<Index>(tree, "fusion.order", 10);
  c.fusion.whiten = parse_bool(get<std::string>(tree, "fusion.whiten", "true"), "fusion.whiten");
  c.fusion.iva.step_size = get<double>(tree, "iva.step_size", 0.1);
  c.fusion.iva.max_iters = get<int>(tree, "iva.max_iters", 2048);
  c.fusion.iva.tol = get<double>(tree, "iva.tol", 1e-6);
  c.fusion.iva.restarts = get<int>(tree, "iva.restarts", 4);
  const auto init = get<std::string>(tree, "iva.init", "identity");
  if (init == "identity") {
    c.fusion.iva.init = IvaInit::Identity;
  } else if (init == "perturbed") {
    c.fusion.iva.init = IvaInit::SeededPerturbation;
  } else {
    throw Error("config: iva.init must be identity or perturbed");
  }
  c.fusion.iva.seed = c.seed;
  c.fusion = fusion::parse_mode(get<std::string>(tree, "run.mode", "iva"), c.fusion);

  c.cv.outer_folds = get<int>(tree, "cv.folds", 5);
  c.cv.repeats = get<int>(tree, "cv.repeats", 30);
  c.cv.train_fraction = get<double>(tree, "cv.train", 0.8);
  c.cv.validation_fraction = get<double>(tree, "cv.validation", 0.1);
  c.cv.test_fraction = get<double>(tree, "cv.test", 0.1);
  if (const auto s = tree.get_optional<std::string>("cv.sigma_scales")) c.cv.sigma_scales = doubles(*s, "cv.sigma_scales");
  if (const auto s = tree.get_optional<std::string>("cv.lambda_grid")) c.cv.lambda_grid = doubles(*s, "cv.lambda_grid");
  c.cv.median_cap = get<Index>(tree, "cv.median_cap", 2000);
  c.cv.seed = c.seed;

  for (double v : doubles(get<std::string>(tree, "curve.sizes", ""), "curve.sizes")) {
    c.curve_sizes.push_back(static_cast<Index>(v));
  }
  c.sweep_k = get<int>(tree, "sweep.k", 2);

  c.bench.K = get<Index>(tree, "bench.K", 3);
  c.bench.P = get<Index>(tree, "bench.P", 5);
  c.bench.N = get<Index>(tree, "bench.N", 5000);
  c.bench.rho = get<double>(tree, "bench.rho", 0.5);
  c.bench.cond_bound = get<double>(tree, "bench.cond_bound", 10.0);
  c.bench.seeds = get<int>(tree, "bench.seeds", 50);
  if (const auto s = tree.get_optional<std::string>("bench.modes")) c.bench.modes = split_list(*s);
  c.bench.independent_slices =
      parse_bool(get<std::string>(tree, "bench.independent_slices", "false"), "bench.independent_slices");

  c.fusion.iva.validate();
  c.cv.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  RunConfig c = parse_config(ss.str(), base);
  c.source = path;
  return c;
}

std::string RunConfig::snapshot() const {
  std::ostringstream os;
  auto fmt = dataio::format_double;
  os << "[run]\n"
     << "seed = " << seed << "\n"
     << "out = " << out.string() << "\n"
     << "mode = " << fusion::mode_name(fusion) << "\n";
  os << "\n[data]\n";
  std::vector<std::string> refs;
  for (const auto& t : tables) refs.push_back(t.name + ":" + t.path.string());
  os << "tables = " << join(refs) << "\n"
     << "smiles = " << smiles.string() << "\n"
     << "xyz = " << xyz.string() << "\n"
     << "labels = " << labels.string() << "\n"
     << "property = " << property << "\n"
     << "subsample = " << subsample << "\n"
     << "dmax = " << dmax << "\n";
  os << "\n[fusion]\n"
     << "order = " << fusion.order << "\n"
     << "whiten = " << (fusion.whiten ? "true" : "false") << "\n";
  os << "\n[iva]\n"
     << "step_size = " << fmt(fusion.iva.step_size) << "\n"
     << "max_iters = " << fusion.iva.max_iters << "\n"
     << "tol = " << fmt(fusion.iva.tol) << "\n"
     << "init = " << (fusion.iva.init == IvaInit::Identity ? "identity" : "perturbed") << "\n"
     << "restarts = " << fusion.iva.restarts << "\n";
  os << "\n[cv]\n"
     << "folds = " << cv.outer_folds << "\n"
     << "repeats = " << cv.repeats << "\n"
     << "train = " << fmt(cv.train_fraction) << "\n"
     << "validation = " << fmt(cv.validation_fraction) << "\n"
     << "test = " << fmt(cv.test_fraction) << "\n"
     << "sigma_scales = " << list_text(cv.sigma_scales) << "\n"
     << "lambda_grid = " << list_text(cv.lambda_grid) << "\n"
     << "median_cap = " << cv.median_cap << "\n";
  std::vector<std::string> sizes;
  for (auto s : curve_sizes) sizes.push_back(std::to_string(s));
  os << "\n[curve]\nsizes = " << join(sizes) << "\n";
  os << "\n[sweep]\nk = " << sweep_k << "\n";
  os << "\n[bench]\n"
     << "K = " << bench.K << "\n"
     << "P = " << bench.P << "\n"
     << "N = " << bench.N << "\n"
     << "rho = " << fmt(bench.rho) << "\n"
     << "cond_bound = " << fmt(bench.cond_bound) << "\n"
     << "seeds = " << bench.seeds << "\n"
     << "modes = " << join(bench.modes) << "\n"
     << "independent_slices = " << (bench.independent_slices ? "true" : "false") << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : snapshot()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ivafuse
