#include <cstdio>
#include <sstream>

#include "rosyn/io/io.hpp"

namespace rosyn::io {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_vector(std::ostringstream& os, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << num(v(i));
}

void put_names(std::ostringstream& os, const char* prefix, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) os << ',' << prefix << i + 1;
}

}  // namespace

std::string value_csv(const abstraction::FiniteAbstraction& abs, const synthesis::ValueTable& values) {
  std::ostringstream os;
  os << "state";
  put_names(os, "x1_", abs.grid.dim());
  os << ",location,value\n";
  for (std::size_t i = 0; i < abs.num_cells(); ++i) {
    const Eigen::VectorXd z = abs.representative(i);
    for (std::size_t q = 0; q < values.num_locations; ++q) {
      os << i;
      put_vector(os, z);
      os << ',' << q << ',' << num(values.at(i, q)) << '\n';
    }
  }
  return os.str();
}

std::string bound_curve_csv(const abstraction::FiniteAbstraction& abs, const std::vector<double>& bound) {
  std::ostringstream os;
  os << "state";
  put_names(os, "x1_", abs.grid.dim());
  os << ",bound\n";
  for (std::size_t i = 0; i < abs.num_cells() && i < bound.size(); ++i) {
    os << i;
    put_vector(os, abs.representative(i));
    os << ',' << num(bound[i]) << '\n';
  }
  return os.str();
}

std::string trace_csv(const std::vector<refinement::Trace>& traces, const Alphabet& alphabet) {
  std::ostringstream os;
  if (traces.empty() || traces.front().steps.empty()) return "run,t,x1,u1,q,letter,fail_safe,verdict\n";
  const auto& s0 = traces.front().steps.front();
  os << "run,t";
  put_names(os, "x2_", s0.x2.size());
  put_names(os, "y2_", s0.y2.size());
  put_names(os, "u2_", s0.u2.size());
  os << ",x1,u1,q,letter,fail_safe,verdict\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (const auto& s : traces[r].steps) {
      os << r << ',' << s.t;
      put_vector(os, s.x2);
      put_vector(os, s.y2);
      put_vector(os, s.u2);
      os << ',' << s.x1 << ',' << s.u1 << ',' << s.q << ",\"" << alphabet.to_string(s.letter) << "\","
         << (s.fail_safe ? 1 : 0) << ',' << refinement::to_string(traces[r].verdict) << '\n';
    }
  }
  return os.str();
}

}  // namespace rosyn::io
