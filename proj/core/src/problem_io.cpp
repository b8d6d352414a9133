#include "gravipose/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gravipose/error.hpp"
#include "gravipose/format.hpp"

namespace gravipose {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& tok, int line) {
  if (tok == "nan") return std::nan("");
  if (tok == "inf") return INFINITY;
  if (tok == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw InputError("invalid number '" + tok + "'", line);
  return v;
}

std::vector<double> numbers(const std::string& text, char sep, int line) {
  std::vector<double> out;
  std::string tok;
  std::istringstream ss(text);
  if (sep == ' ') {
    while (ss >> tok) out.push_back(to_double(tok, line));
  } else {
    while (std::getline(ss, tok, sep)) out.push_back(to_double(trim(tok), line));
  }
  return out;
}

std::vector<double> expect(const std::string& key, const std::string& value, std::size_t n, int line) {
  auto v = numbers(value, ' ', line);
  if (v.size() != n) {
    throw InputError(key + " expects " + std::to_string(n) + " numbers, got " + std::to_string(v.size()), line);
  }
  return v;
}

GravityObservation unit_gravity(const std::string& key, const std::vector<double>& v, int line) {
  const Vec3 g(v[0], v[1], v[2]);
  if (!std::isfinite(g.norm()) || std::abs(g.norm() - 1.0) > kGravityUnitTol) {
    throw InputError(key + " must be a unit vector (|g| = " + fmt17(g.norm()) + ")", line);
  }
  return {g.normalized()};
}

int to_int(const std::string& tok, int line) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw InputError("invalid integer '" + tok + "'", line);
  return v;
}

std::string join(const double* v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += fmt17(v[i]);
  }
  return s;
}

std::string mat_text(const Mat3& m) {
  double v[9];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v[3 * r + c] = m(r, c);
  return join(v, 9);
}

std::string vec_text(const Vec3& x) { return join(x.data(), 3); }

}  // namespace

std::vector<Correspondence> ProblemFile::calibrated() const {
  std::vector<Correspondence> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (intrinsics) {
      const double f = intrinsics->focal;
      const Vec2& c = intrinsics->principal_point;
      out.push_back(Correspondence::from_uv((r[0] - c.x()) / f, (r[1] - c.y()) / f, (r[2] - c.x()) / f,
                                            (r[3] - c.y()) / f));
    } else {
      out.push_back(Correspondence::from_uv(r[0], r[1], r[2], r[3]));
    }
  }
  return out;
}

double ProblemFile::pixels_to_calibrated(double px) const { return intrinsics ? px / intrinsics->focal : px; }

ProblemFile read_problem(std::istream& in) {
  ProblemFile pf;
  bool have_g1 = false, have_g2 = false, in_block = false;
  std::optional<Mat3> truth_R;
  std::optional<Vec3> truth_t;
  std::optional<double> truth_theta;
  std::optional<double> focal;
  Vec2 pp = Vec2::Zero();
  int columns = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (t == "[correspondences]") {
      if (in_block) throw InputError("duplicate [correspondences] section", lineno);
      in_block = true;
      continue;
    }
    if (in_block) {
      if (t.rfind("u,", 0) == 0) continue;  // optional column header
      const auto v = numbers(t, ',', lineno);
      if (v.size() != 4 && v.size() != 5) {
        throw InputError("correspondence rows need 4 values (u,v,u_prime,v_prime) plus an optional inlier flag", lineno);
      }
      if (columns == 0) columns = static_cast<int>(v.size());
      if (static_cast<int>(v.size()) != columns) throw InputError("inconsistent column count", lineno);
      for (int k = 0; k < 4; ++k) {
        if (!std::isfinite(v[k])) throw InputError("non-finite coordinate", lineno);
      }
      pf.rows.push_back({v[0], v[1], v[2], v[3]});
      if (columns == 5) {
        if (v[4] != 0.0 && v[4] != 1.0) throw InputError("inlier flag must be 0 or 1", lineno);
        pf.labels.push_back(v[4] == 1.0);
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("expected key = value", lineno);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "focal") {
      focal = expect(key, value, 1, lineno)[0];
      if (!(*focal > 0.0)) throw InputError("focal must be positive", lineno);
    } else if (key == "principal_point") {
      const auto v = expect(key, value, 2, lineno);
      pp = Vec2(v[0], v[1]);
    } else if (key == "gravity1") {
      pf.gravity1 = unit_gravity(key, expect(key, value, 3, lineno), lineno);
      have_g1 = true;
    } else if (key == "gravity2") {
      pf.gravity2 = unit_gravity(key, expect(key, value, 3, lineno), lineno);
      have_g2 = true;
    } else if (key == "truth_R") {
      const auto v = expect(key, value, 9, lineno);
      Mat3 R;
      R << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
      truth_R = R;
    } else if (key == "truth_t") {
      const auto v = expect(key, value, 3, lineno);
      truth_t = Vec3(v[0], v[1], v[2]);
    } else if (key == "truth_theta") {
      truth_theta = expect(key, value, 1, lineno)[0];
    } else {
      throw InputError("unknown key '" + key + "'", lineno);
    }
  }
  if (!have_g1 || !have_g2) throw InputError("missing gravity1 / gravity2");
  if (pf.rows.size() < 3) {
    throw InputError("at least 3 correspondences are required, found " + std::to_string(pf.rows.size()));
  }
  if (focal) pf.intrinsics = Intrinsics{*focal, pp};
  if (truth_R || truth_t || truth_theta) {
    GroundTruth gt;
    if (truth_R) gt.R_rel = *truth_R;
    if (truth_t) gt.t_rel = truth_t->normalized();
    gt.theta = truth_theta;
    pf.truth = gt;
  }
  return pf;
}

ProblemFile read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_problem(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_problem(std::ostream& out, const ProblemFile& pf) {
  out << "# gravipose problem\n";
  if (pf.intrinsics) {
    out << "focal = " << fmt17(pf.intrinsics->focal) << '\n';
    out << "principal_point = " << fmt17(pf.intrinsics->principal_point.x()) << ' '
        << fmt17(pf.intrinsics->principal_point.y()) << '\n';
  }
  out << "gravity1 = " << vec_text(pf.gravity1.g) << '\n';
  out << "gravity2 = " << vec_text(pf.gravity2.g) << '\n';
  if (pf.truth) {
    out << "truth_R = " << mat_text(pf.truth->R_rel) << '\n';
    out << "truth_t = " << vec_text(pf.truth->t_rel) << '\n';
    if (pf.truth->theta) out << "truth_theta = " << fmt17(*pf.truth->theta) << '\n';
  }
  out << "[correspondences]\n";
  const bool labels = pf.labels.size() == pf.rows.size() && !pf.labels.empty();
  out << (labels ? "u,v,u_prime,v_prime,inlier\n" : "u,v,u_prime,v_prime\n");
  for (std::size_t i = 0; i < pf.rows.size(); ++i) {
    const auto& r = pf.rows[i];
    out << fmt17(r[0]) << ',' << fmt17(r[1]) << ',' << fmt17(r[2]) << ',' << fmt17(r[3]);
    if (labels) out << ',' << (pf.labels[i] ? 1 : 0);
    out << '\n';
  }
}

PoseReport make_pose_report(const SolverReport& rep) {
  PoseReport r;
  r.method = std::string(method_name(rep.method));
  r.pose = rep.best;
  r.candidates = rep.candidates;
  r.time_us = rep.time_us;
  r.positive_depths = rep.positive_depths;
  r.companion_size = rep.companion_size;
  r.poly_degree = rep.poly_degree;
  r.used_fallback = rep.used_fallback;
  r.warnings = rep.warnings;
  return r;
}

void write_pose_report(std::ostream& out, const PoseReport& r) {
  out << "# gravipose pose report\n";
  out << "command = " << r.command << '\n';
  out << "method = " << r.method << '\n';
  out << "theta = " << fmt17(r.pose.theta) << '\n';
  out << "y = " << fmt17(r.pose.y) << '\n';
  out << "alpha_min = " << fmt17(r.pose.score) << '\n';
  out << "R_rel = " << mat_text(r.pose.R_rel) << '\n';
  out << "t_rel = " << vec_text(r.pose.t_rel) << '\n';
  out << "t_aligned = " << vec_text(r.pose.t_aligned) << '\n';
  out << "time_us = " << fmt17(r.time_us) << '\n';
  out << "positive_depths = " << r.positive_depths << '\n';
  out << "companion_size = " << r.companion_size << '\n';
  out << "poly_degree = " << r.poly_degree << '\n';
  out << "used_fallback = " << (r.used_fallback ? 1 : 0) << '\n';
  for (const auto& w : r.warnings) out << "warning = " << w << '\n';
  if (r.iterations) out << "iterations = " << *r.iterations << '\n';
  if (r.lo_rounds) out << "lo_rounds = " << *r.lo_rounds << '\n';
  if (!r.inlier_mask.empty()) {
    int n = 0;
    std::string mask;
    for (bool b : r.inlier_mask) {
      mask += b ? '1' : '0';
      n += b;
    }
    out << "inliers = " << n << '\n';
    out << "inlier_mask = " << mask << '\n';
  }
  out << "candidates = " << r.candidates.size() << '\n';
  for (const auto& c : r.candidates) {
    out << "candidate = " << fmt17(c.y) << ' ' << fmt17(c.theta) << ' ' << fmt17(c.alpha_min) << ' '
        << vec_text(c.t_aligned) << ' ' << (c.boundary ? 1 : 0) << '\n';
  }
}

PoseReport read_pose_report(std::istream& in) {
  PoseReport r;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "command") {
      r.command = value;
    } else if (key == "method") {
      r.method = value;
    } else if (key == "theta") {
      r.pose.theta = expect(key, value, 1, lineno)[0];
    } else if (key == "y") {
      r.pose.y = expect(key, value, 1, lineno)[0];
    } else if (key == "alpha_min") {
      r.pose.score = expect(key, value, 1, lineno)[0];
    } else if (key == "R_rel") {
      const auto v = expect(key, value, 9, lineno);
      r.pose.R_rel << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    } else if (key == "t_rel") {
      const auto v = expect(key, value, 3, lineno);
      r.pose.t_rel = Vec3(v[0], v[1], v[2]);
    } else if (key == "t_aligned") {
      const auto v = expect(key, value, 3, lineno);
      r.pose.t_aligned = Vec3(v[0], v[1], v[2]);
    } else if (key == "time_us") {
      r.time_us = expect(key, value, 1, lineno)[0];
    } else if (key == "positive_depths") {
      r.positive_depths = to_int(value, lineno);
    } else if (key == "companion_size") {
      r.companion_size = to_int(value, lineno);
    } else if (key == "poly_degree") {
      r.poly_degree = to_int(value, lineno);
    } else if (key == "used_fallback") {
      r.used_fallback = to_int(value, lineno) != 0;
    } else if (key == "warning") {
      r.warnings.push_back(value);
    } else if (key == "iterations") {
      r.iterations = to_int(value, lineno);
    } else if (key == "lo_rounds") {
      r.lo_rounds = to_int(value, lineno);
    } else if (key == "inliers" || key == "candidates") {
      to_int(value, lineno);
    } else if (key == "inlier_mask") {
      for (char ch : value) {
        if (ch != '0' && ch != '1') throw InputError("inlier_mask must be a 0/1 string", lineno);
        r.inlier_mask.push_back(ch == '1');
      }
    } else if (key == "candidate") {
      const auto v = expect(key, value, 7, lineno);
      PoseCandidate c;
      c.y = v[0];
      c.theta = v[1];
      c.alpha_min = v[2];
      c.t_aligned = Vec3(v[3], v[4], v[5]);
      c.boundary = v[6] != 0.0;
      r.candidates.push_back(c);
    } else {
      throw InputError("unknown key '" + key + "'", lineno);
    }
  }
  return r;
}

}  // namespace gravipose
