#include "rbs/surface/shape.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "rbs/errors.hpp"

namespace rbs::surface {

namespace {

HarmonicCoeffs resize_coeffs(const HarmonicCoeffs& in, int p) {
  if (in.degree() <= p) return in.padded(p);
  HarmonicCoeffs out(p, in.components());
  out.data() = in.data().topRows(coeff_count(p));
  return out;
}

}  // namespace

ShapeModel::ShapeModel(std::string name, const HarmonicCoeffs& coords, int p, bool recenter)
    : name_(std::move(name)), grid_(p), coeffs_(resize_coeffs(coords, p)) {
  if (coeffs_.components() != 3) throw InvalidArgument("shape coefficients need 3 components");
  coeffs_.enforce_real_symmetry();

  const int m = grid_.size();
  analysis_ = analysis_matrix(grid_);
  synthesis_ = synthesis_matrices(p, grid_);

  real_coeffs_ = coeffs_.to_real();
  const MatX X = synthesis_.value * real_coeffs_;
  const MatX Xt = synthesis_.dtheta * real_coeffs_;
  const MatX Xps = synthesis_.dphi_over_sin * real_coeffs_;

  x_.resize(m, 3);
  x_theta_.resize(m, 3);
  x_phi_.resize(m, 3);
  n_.resize(m, 3);
  W_.resize(m);
  dS_.resize(m);
  for (int j = 0; j < grid_.n_theta(); ++j) {
    const double s = std::sin(grid_.theta(j));
    for (int k = 0; k < grid_.n_phi(); ++k) {
      const int i = grid_.index(j, k);
      const Vec3 xt = Xt.row(i).transpose();
      const Vec3 xp = s * Xps.row(i).transpose();
      const double E = xt.dot(xt), F = xt.dot(xp), G = xp.dot(xp);
      const double disc = E * G - F * F;
      const double W = disc > 0.0 ? std::sqrt(disc) : 0.0;
      if (!(W > 1e-14 * std::max(1.0, E))) {
        throw GeometryError("degenerate surface '" + name_ + "': area element vanishes at node " + std::to_string(i));
      }
      x_.row(i) = X.row(i);
      x_theta_.row(i) = xt.transpose();
      x_phi_.row(i) = xp.transpose();
      n_.row(i) = xt.cross(xp).normalized().transpose();
      W_(i) = W;
      dS_(i) = grid_.quad_weight(j) * W;
    }
  }

  // Orientation: the enclosed volume must come out positive.
  double flux = 0.0;
  for (int i = 0; i < m; ++i) flux += dS_(i) * x_.row(i).dot(n_.row(i));
  if (flux < 0.0) n_ = -n_;

  area_ = dS_.sum();
  Vec3 c = Vec3::Zero();
  for (int i = 0; i < m; ++i) c += dS_(i) * x_.row(i).transpose();
  c /= area_;
  if (!recenter) c.setZero();
  input_centroid_ = c;
  for (int i = 0; i < m; ++i) x_.row(i) -= c.transpose();
  const double y00 = std::sqrt(4.0 * kPi);
  for (int d = 0; d < 3; ++d) {
    coeffs_(d, 0, 0) -= c(d) * y00;
    real_coeffs_(0, d) -= c(d) * y00;
  }

  for (int i = 0; i < m; ++i) {
    const Vec3 r = x_.row(i).transpose();
    inertia_ += dS_(i) * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  }

  h_ = 0.0;
  bound_ = 0.0;
  for (int j = 0; j < grid_.n_theta(); ++j) {
    for (int k = 0; k < grid_.n_phi(); ++k) {
      const int i = grid_.index(j, k);
      const int right = grid_.index(j, (k + 1) % grid_.n_phi());
      h_ = std::max(h_, (x_.row(i) - x_.row(right)).norm());
      if (j + 1 < grid_.n_theta()) h_ = std::max(h_, (x_.row(i) - x_.row(grid_.index(j + 1, k))).norm());
      bound_ = std::max(bound_, x_.row(i).norm());
    }
  }
  bound_ += h_;
}

std::shared_ptr<const ShapeModel> ShapeModel::upsampled(int p_target) const {
  if (p_target < degree()) throw InvalidArgument("upsampling target degree is below the shape degree");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = upsampled_.find(p_target);
  if (it != upsampled_.end()) return it->second;
  auto shape = std::make_shared<const ShapeModel>(name_, coeffs_, p_target, false);
  upsampled_.emplace(p_target, shape);
  return shape;
}

HarmonicCoeffs sphere_coefficients(double radius) { return ellipsoid_coefficients(radius, radius, radius); }

HarmonicCoeffs ellipsoid_coefficients(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidArgument("ellipsoid semi-axes must be positive");
  // x = a sin(t) cos(p), y = b sin(t) sin(p), z = c cos(t) against
  // Y_1^{+-1} = sqrt(3/8pi) sin(t) e^{+-ip}, Y_1^0 = sqrt(3/4pi) cos(t).
  HarmonicCoeffs h(1, 3);
  const double s = std::sqrt(2.0 * kPi / 3.0);
  h(0, 1, 1) = Complex(a * s, 0.0);
  h(0, 1, -1) = Complex(a * s, 0.0);
  h(1, 1, 1) = Complex(0.0, -b * s);
  h(1, 1, -1) = Complex(0.0, b * s);
  h(2, 1, 0) = Complex(c * std::sqrt(4.0 * kPi / 3.0), 0.0);
  return h;
}

ShapePtr make_sphere(double radius, int p) {
  std::ostringstream name;
  name << "sphere(" << radius << ")";
  return std::make_shared<const ShapeModel>(name.str(), sphere_coefficients(radius), p);
}

ShapePtr make_ellipsoid(double a, double b, double c, int p) {
  std::ostringstream name;
  name << "ellipsoid(" << a << "," << b << "," << c << ")";
  return std::make_shared<const ShapeModel>(name.str(), ellipsoid_coefficients(a, b, c), p);
}

HarmonicCoeffs builtin_shape(const std::string& spec) {
  static const std::regex call(R"(\s*([a-z]+)\s*\(([^)]*)\)\s*)");
  std::smatch match;
  if (!std::regex_match(spec, match, call)) throw InvalidArgument("unknown shape '" + spec + "'");
  std::vector<double> args;
  std::stringstream list(match[2].str());
  std::string item;
  while (std::getline(list, item, ',')) {
    try {
      args.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("bad shape parameter '" + item + "' in '" + spec + "'");
    }
  }
  const std::string kind = match[1].str();
  if (kind == "sphere" && args.size() == 1) return sphere_coefficients(args[0]);
  if (kind == "ellipsoid" && args.size() == 3) return ellipsoid_coefficients(args[0], args[1], args[2]);
  throw InvalidArgument("unknown shape '" + spec + "'");
}

ShapeLibrary ShapeLibrary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open shape library " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ShapeLibrary ShapeLibrary::parse(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("shape library is not valid JSON: ") + e.what());
  }
  const json& list = doc.is_object() && doc.contains("shapes") ? doc["shapes"] : doc;
  if (!list.is_array()) throw InvalidArgument("shape library must be an array of shapes");
  ShapeLibrary lib;
  for (const json& entry : list) {
    try {
      const std::string name = entry.at("name").get<std::string>();
      const int p = entry.at("p").get<int>();
      const json& coeffs = entry.at("coeffs");
      if (!coeffs.is_array() || coeffs.size() != 3) throw InvalidArgument("shape '" + name + "' needs 3 coefficient lists");
      HarmonicCoeffs h(p, 3);
      for (int d = 0; d < 3; ++d) {
        if (coeffs[d].size() != static_cast<size_t>(coeff_count(p)))
          throw InvalidArgument("shape '" + name + "' component " + std::to_string(d) + " has " +
                                std::to_string(coeffs[d].size()) + " coefficients, expected " +
                                std::to_string(coeff_count(p)));
        for (int q = 0; q < coeff_count(p); ++q)
          h.data()(q, d) = Complex(coeffs[d][q].at(0).get<double>(), coeffs[d][q].at(1).get<double>());
      }
      lib.add({name, h});
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("malformed shape library entry: ") + e.what());
    }
  }
  return lib;
}

std::string ShapeLibrary::to_json() const {
  using nlohmann::json;
  json list = json::array();
  for (const ShapeEntry& e : entries_) {
    json comps = json::array();
    for (int d = 0; d < 3; ++d) {
      json c = json::array();
      for (int q = 0; q < coeff_count(e.coords.degree()); ++q) {
        const Complex z = e.coords.data()(q, d);
        c.push_back({z.real(), z.imag()});
      }
      comps.push_back(c);
    }
    list.push_back({{"name", e.name}, {"p", e.coords.degree()}, {"coeffs", comps}});
  }
  return json{{"shapes", list}}.dump(2);
}

void ShapeLibrary::add(ShapeEntry entry) {
  if (entry.coords.components() != 3) throw InvalidArgument("shape '" + entry.name + "' needs 3 components");
  for (auto& e : entries_) {
    if (e.name == entry.name) {
      e = std::move(entry);
      return;
    }
  }
  entries_.push_back(std::move(entry));
}

bool ShapeLibrary::contains(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

HarmonicCoeffs ShapeLibrary::coefficients(const std::string& spec) const {
  for (const auto& e : entries_)
    if (e.name == spec) return e.coords;
  return builtin_shape(spec);
}

ShapePtr ShapeLibrary::build(const std::string& spec, int p) const {
  return std::make_shared<const ShapeModel>(spec, coefficients(spec), p);
}

}  // namespace rbs::surface
