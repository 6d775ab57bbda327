#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmeobst/approximation.hpp"
#include "pmeobst/harnack.hpp"
#include "pmeobst/obstacle.hpp"
#include "pmeobst/solver.hpp"
#include "pmeobst/verify.hpp"

namespace py = pybind11;
using namespace pmeobst;

namespace {

SpaceTimeGrid grid_from_args(const std::vector<std::pair<double, double>>& dom,
                             const std::vector<int>& n_space, int n_time,
                             double T) {
  std::vector<Interval> d;
  for (const auto& [lo, hi] : dom) d.push_back({lo, hi});
  return SpaceTimeGrid::create(d, n_space, n_time, T);
}

// fields cross the boundary as arrays shaped (n_time, ny, nx) / (n_time, nx)
py::array_t<double> field_to_array(const ScalarField& f) {
  const auto& g = f.grid();
  std::vector<py::ssize_t> shape{g.n_time()};
  if (g.spatial_dim() == 2) shape.push_back(g.n_space(1));
  shape.push_back(g.n_space(0));
  py::array_t<double> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

ScalarField field_from_array(const SpaceTimeGrid& g,
                             const py::array_t<double>& arr) {
  py::array_t<double, py::array::c_style | py::array::forcecast> c(arr);
  const auto* data = c.data();
  std::vector<double> values(data, data + c.size());
  return ScalarField::from_values(g, std::move(values));
}

}  // namespace

PYBIND11_MODULE(_pmeobst, m) {
  m.doc() = "porous-medium obstacle toolbox";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<GeometryError>(m, "GeometryError");
  py::register_exception<DomainError>(m, "DomainError");

  py::class_<SpaceTimeGrid>(m, "Grid")
      .def(py::init(&grid_from_args), py::arg("domain"), py::arg("n_space"),
           py::arg("n_time"), py::arg("T"))
      .def_property_readonly("spatial_dim", &SpaceTimeGrid::spatial_dim)
      .def_property_readonly("n_time", &SpaceTimeGrid::n_time)
      .def_property_readonly("tau", &SpaceTimeGrid::tau)
      .def_property_readonly("T", &SpaceTimeGrid::final_time)
      .def("h", &SpaceTimeGrid::h, py::arg("axis"))
      .def("n_space", &SpaceTimeGrid::n_space, py::arg("axis"))
      .def("coord", &SpaceTimeGrid::coord, py::arg("axis"), py::arg("i"))
      .def("time", &SpaceTimeGrid::time, py::arg("k"));

  m.def(
      "barenblatt",
      [](std::vector<double> x, double t, double mm, int n, double C) {
        return barenblatt(x, t, mm, n, C);
      },
      py::arg("x"), py::arg("t"), py::arg("m"), py::arg("n"), py::arg("C"));

  m.def(
      "barenblatt_field",
      [](const SpaceTimeGrid& g, double mm, double C, double t_offset,
         std::vector<double> center) {
        return field_to_array(barenblatt_field(g, mm, C, t_offset, center));
      },
      py::arg("grid"), py::arg("m"), py::arg("C"), py::arg("t_offset"),
      py::arg("center") = std::vector<double>{});

  m.def(
      "enumerate_boxes",
      [](const SpaceTimeGrid& g, int level, const std::string& order) {
        const auto boxes = enumerate_boxes(
            g, level,
            order == "reversed" ? BoxOrder::kReversedWithinLevel
                                : BoxOrder::kLexicographic);
        py::list out;
        for (const auto& eb : boxes) {
          py::dict d;
          d["level"] = eb.level;
          d["ordinal"] = eb.ordinal;
          d["lo"] = std::vector<int>(eb.box.lo.begin(),
                                     eb.box.lo.begin() + eb.box.dim);
          d["hi"] = std::vector<int>(eb.box.hi.begin(),
                                     eb.box.hi.begin() + eb.box.dim);
          d["t_start"] = eb.box.t_start;
          out.append(d);
        }
        return out;
      },
      py::arg("grid"), py::arg("level"), py::arg("order") = "lex");

  m.def(
      "solve_bvp",
      [](const SpaceTimeGrid& g, const py::array_t<double>& data, double mm) {
        SolverConfig cfg;
        cfg.m = mm;
        const auto u =
            solve_box(field_from_array(g, data),
                      SpaceTimeBox::full_cylinder(g), cfg);
        return field_to_array(u);
      },
      py::arg("grid"), py::arg("data"), py::arg("m") = 2.0,
      "March the implicit scheme on the full cylinder with Dirichlet data "
      "taken from `data` on the parabolic boundary.");

  m.def(
      "solve_obstacle",
      [](const SpaceTimeGrid& g, const py::array_t<double>& psi, double mm,
         const std::string& order) {
        ObstacleConfig cfg;
        cfg.solver.m = mm;
        cfg.order = order == "reversed" ? BoxOrder::kReversedWithinLevel
                                        : BoxOrder::kLexicographic;
        const auto res = solve_obstacle_continuous(
            Obstacle::from_table(field_from_array(g, psi),
                                 Regularity::kContinuous),
            g, cfg);
        py::dict info;
        info["sweeps"] = res.sweeps;
        info["stop_tol"] = res.stop_tol;
        info["box_solves"] = res.trace.boxes.size();
        return py::make_tuple(field_to_array(res.u), info);
      },
      py::arg("grid"), py::arg("psi"), py::arg("m") = 2.0,
      py::arg("order") = "lex",
      "Minimal supersolution above nodal obstacle values.");

  m.def(
      "lift_obstacle",
      [](const SpaceTimeGrid& g, const py::array_t<double>& u, double eps,
         double mm) {
        const auto table =
            lift_obstacle(field_from_array(g, u), eps, mm).sample(g);
        return field_to_array(table);
      },
      py::arg("grid"), py::arg("u"), py::arg("eps"), py::arg("m") = 2.0);

  m.def(
      "certify_supersolution",
      [](const SpaceTimeGrid& g, const py::array_t<double>& u, double mm,
         int battery_size) {
        const auto rep =
            certify_supersolution(field_from_array(g, u), mm, battery_size);
        py::dict d;
        d["pass"] = rep.pass;
        d["bumps"] = rep.bumps;
        d["worst_residual"] = rep.worst.residual;
        d["worst_tol"] = rep.worst.tol;
        return d;
      },
      py::arg("grid"), py::arg("u"), py::arg("m") = 2.0,
      py::arg("battery_size") = 3);

  m.def(
      "harnack_quantities",
      [](const SpaceTimeGrid& g, const py::array_t<double>& u,
         std::vector<double> x0, double rho, double t0, double C1, double mm) {
        HarnackGeometry geom{std::move(x0), rho, t0};
        const auto q =
            harnack_quantities(field_from_array(g, u), geom, C1, mm);
        py::dict d;
        d["avg"] = q.avg;
        d["tau"] = q.tau_wait;
        d["essinf"] = q.essinf;
        d["tail"] = q.tail;
        return d;
      },
      py::arg("grid"), py::arg("u"), py::arg("x0"), py::arg("rho"),
      py::arg("t0"), py::arg("C1") = 1.0, py::arg("m") = 2.0);

  m.attr("__version__") = "0.1.0";
}
