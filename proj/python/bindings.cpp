#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "andersonlab/nls.hpp"
#include "andersonlab/paraproducts.hpp"
#include "andersonlab/propagator.hpp"
#include "andersonlab/strichartz.hpp"

namespace py = pybind11;
using namespace andersonlab;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

// Coefficient arrays have shape (M,) * dim in FFT order, as numpy.fft.fftn(values) / M**dim.
TorusField to_field(const CArray& a) {
  int dim = int(a.ndim());
  if (dim < 2 || dim > 3) throw ConfigError("coefficient array must be 2d or 3d");
  int M = int(a.shape(0));
  for (int i = 1; i < dim; ++i)
    if (a.shape(i) != M) throw ConfigError("coefficient array must be square");
  std::vector<cplx> c(a.data(), a.data() + a.size());
  return TorusField::from_coeffs(dim, M, std::move(c));
}

CArray to_array(const TorusField& f) {
  std::vector<py::ssize_t> shape(f.dim(), f.grid());
  CArray out(shape);
  std::copy(f.coeffs().begin(), f.coeffs().end(), out.mutable_data());
  return out;
}

CArray values_array(const TorusField& f) {
  auto v = f.values();
  std::vector<py::ssize_t> shape(f.dim(), f.grid());
  CArray out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Band parse_band(double K) { return K > 0 ? Band::ball(K) : Band::box(); }

struct Anderson2d {
  std::shared_ptr<const AndersonOperator2d> op;
  std::shared_ptr<AndersonGroup> group;
};

Anderson2d make_2d(int M, double eps, double K, std::uint64_t seed, double amplitude) {
  auto noise = enhance_2d(sample_white_noise(2, M, seed).field, Mollifier::sharp(eps), amplitude, seed);
  Anderson2d a;
  a.op = K > 0 ? std::make_shared<const AndersonOperator2d>(std::move(noise), K)
               : std::make_shared<const AndersonOperator2d>(std::move(noise), Band::box());
  a.group = std::make_shared<AndersonGroup>(a.op);
  return a;
}

py::dict report_dict(const ScalingReport& r) {
  py::dict d;
  d["generator"] = r.generator;
  d["d"] = r.d;
  d["p"] = r.p;
  d["N"] = r.N_list;
  d["mean_norm"] = r.mean_norm;
  d["std_norm"] = r.std_norm;
  d["slope"] = r.fit.slope;
  d["slope_stderr"] = r.fit.slope_stderr;
  d["theory_slope"] = r.theory_slope;
  d["tolerance"] = r.tolerance;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_andersonlab, m) {
  m.doc() = "Spectral laboratory for the renormalized Anderson Hamiltonian on the 2d and 3d torus.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("white_noise", [](int dim, int M, std::uint64_t seed) { return to_array(sample_white_noise(dim, M, seed).field); },
        py::arg("dim"), py::arg("M"), py::arg("seed"));
  m.def("values", [](const CArray& c) { return values_array(to_field(c)); }, py::arg("coeffs"));
  m.def("mode", [](int dim, int M, std::array<int, 3> k) { return to_array(TorusField::mode(dim, M, k)); },
        py::arg("dim"), py::arg("M"), py::arg("k"));

  m.def("para_lt", [](const CArray& f, const CArray& g) { return to_array(para_lt(to_field(f), to_field(g))); });
  m.def("para_gt", [](const CArray& f, const CArray& g) { return to_array(para_gt(to_field(f), to_field(g))); });
  m.def("resonant", [](const CArray& f, const CArray& g) { return to_array(resonant(to_field(f), to_field(g))); });
  m.def("product", [](const CArray& f, const CArray& g) { return to_array(product(to_field(f), to_field(g))); });

  m.def("lp_norm", [](const CArray& f, double p) { return lp_norm(to_field(f), p); }, py::arg("coeffs"),
        py::arg("p"));
  m.def("sobolev_norm", [](const CArray& f, double s) { return sobolev_norm(to_field(f), s); }, py::arg("coeffs"),
        py::arg("s"));
  m.def("besov_norm", [](const CArray& f, double a, double p, double q) { return besov_norm(to_field(f), a, p, q); },
        py::arg("coeffs"), py::arg("alpha"), py::arg("p"), py::arg("q"));
  m.def("free_propagate", [](const CArray& f, double t) { return to_array(free_propagate(to_field(f), t)); },
        py::arg("coeffs"), py::arg("t"));

  m.def("renorm_constant_2d", [](double eps, int M) { return renorm_constant_2d(eps, Mollifier::sharp(eps), M); },
        py::arg("eps"), py::arg("M"));
  m.def("renorm_constants_3d",
        [](double eps, int M) {
          auto c = renorm_constants_3d(eps, Mollifier::sharp(eps), M);
          return py::make_tuple(c.c1, c.c2);
        },
        py::arg("eps"), py::arg("M"));

  py::class_<Anderson2d>(m, "Anderson2d")
      .def(py::init(&make_2d), py::arg("M"), py::arg("eps"), py::arg("K") = 0.0, py::arg("seed") = 1,
           py::arg("amplitude") = 1.0, "2d operator on the band |k| <= K (K = 0 keeps every grid mode)")
      .def_property_readonly("shift", [](const Anderson2d& a) { return a.op->shift(); })
      .def_property_readonly("cutoff", [](const Anderson2d& a) { return a.op->cutoff(); })
      .def_property_readonly("kappa", [](const Anderson2d& a) { return a.op->kappa(); })
      .def("random_band_field",
           [](const Anderson2d& a, std::uint64_t seed, double s) { return to_array(a.op->random_band_field(seed, s)); },
           py::arg("seed"), py::arg("s") = 0.0)
      .def("gamma", [](const Anderson2d& a, const CArray& u) { return to_array(a.op->gamma(to_field(u))); })
      .def("gamma_inverse",
           [](const Anderson2d& a, const CArray& u) { return to_array(a.op->gamma_inverse(to_field(u))); })
      .def("h_sharp", [](const Anderson2d& a, const CArray& u) { return to_array(a.op->h_sharp_apply(to_field(u))); })
      .def("propagate",
           [](const Anderson2d& a, const CArray& u, double t) { return to_array(a.group->propagate(to_field(u), t)); },
           py::arg("u"), py::arg("t"))
      .def("sharp_propagate",
           [](const Anderson2d& a, const CArray& u, double t) {
             return to_array(a.group->sharp_propagate(to_field(u), t));
           },
           py::arg("u_sharp"), py::arg("t"))
      .def("mass", [](const Anderson2d& a, const CArray& u) { return a.group->mass(to_field(u)); })
      .def("energy", [](const Anderson2d& a, const CArray& u) { return a.group->energy(to_field(u)); })
      .def("eigenvalues", [](const Anderson2d& a) { return a.op->eigensystem().values; });

  m.def("laplacian_scaling",
        [](int d, double p, std::vector<int> N, std::vector<std::uint64_t> seeds, int M, int n_t) {
          ScalingOptions opt;
          opt.M = M;
          opt.n_t = n_t;
          return report_dict(laplacian_scaling(d, p, N, seeds, opt));
        },
        py::arg("d"), py::arg("p"), py::arg("N"), py::arg("seeds"), py::arg("M") = 256, py::arg("n_t") = 128);
}
