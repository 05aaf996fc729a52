#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <json.hpp>

#include "tele/api_service.hpp"
#include "tele/cli.hpp"
#include "tele/error.hpp"
#include "tele/maturity.hpp"
#include "tele/pipeline.hpp"
#include "tele/radar_report.hpp"
#include "tele/synthgen.hpp"

namespace py = pybind11;

namespace {

using json = nlohmann::json;

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(to_py(v));
      return l;
    }
    case json::value_t::object: {
      py::dict d;
      for (auto it = j.begin(); it != j.end(); ++it) d[py::str(it.key())] = to_py(it.value());
      return d;
    }
    default: return py::none();
  }
}

py::object parse_json(const std::string& text) { return to_py(json::parse(text)); }

std::vector<tele::Window> parse_windows(const std::vector<std::string>& texts) {
  std::vector<tele::Window> out;
  for (const auto& t : texts) out.push_back(tele::parse_window(t));
  return out;
}

// In-process view of one data directory, served through the same request
// handler as the HTTP API.
class Engine {
 public:
  Engine(const std::string& data_dir, const std::vector<std::string>& periods) {
    tele::ServiceConfig c;
    c.data_dir = data_dir;
    c.periods = parse_windows(periods);
    service_ = std::make_unique<tele::Service>(c);
  }

  std::uint64_t snapshot_id() const { return service_->current()->id; }

  py::tuple request(const std::string& method, const std::string& path, const std::string& token,
                    const std::map<std::string, std::string>& params, const std::string& body) {
    tele::Request r;
    r.method = method;
    r.path = path;
    if (!token.empty()) r.authorization = "Bearer " + token;
    r.params = params;
    r.body = body;
    tele::Response out;
    {
      py::gil_scoped_release release;
      out = service_->dispatch(r);
    }
    py::object payload = out.content_type == "application/json" ? parse_json(out.body)
                                                                 : py::str(out.body);
    return py::make_tuple(out.status, payload);
  }

  std::uint64_t rebuild() {
    py::gil_scoped_release release;
    return service_->rebuild();
  }

  std::string write_cube() const {
    std::ostringstream out;
    tele::write_cube(out, service_->current()->cube());
    return out.str();
  }

  std::string radar_svg(const std::string& node, std::size_t period) const {
    auto snap = service_->current();
    tele::Principal op{"operator", tele::Role{tele::RoleKind::direction, ""}, "", false};
    return tele::render_svg(tele::radar_dataset(snap->cube(), node, period, op));
  }

  py::list levels() const {
    auto snap = service_->current();
    std::ostringstream out;
    tele::write_level_profiles(out, snap->outputs.levels);
    py::list rows;
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) rows.append(parse_json(line));
    return rows;
  }

 private:
  std::unique_ptr<tele::Service> service_;
};

}  // namespace

PYBIND11_MODULE(tele, m) {
  m.doc() = "TELE maturity analytics engine";

  static py::exception<tele::Error> error(m, "TeleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const tele::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = tele::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a tele subcommand; returns (exit code, stdout, stderr).");

  m.def(
      "classify",
      [](double value, const std::array<double, 4>& cuts) {
        return tele::value_of(tele::classify(value, cuts));
      },
      py::arg("value"), py::arg("cuts"), "Level (1..5) of a scalar under four cut points.");

  m.def(
      "composite_score",
      [](const std::vector<int>& levels) {
        std::vector<tele::Level> ls;
        for (int v : levels) ls.push_back(tele::level_from_value(v));
        return tele::composite_score(ls);
      },
      py::arg("levels"));

  m.def("default_thresholds", [] {
    std::ostringstream out;
    tele::write_thresholds(out, tele::default_thresholds());
    return parse_json(out.str());
  });

  m.def(
      "synth",
      [](const std::string& out_dir, std::optional<std::uint64_t> seed, std::int64_t n_users,
         std::int64_t n_cus, int days, double daily_visits_mean) {
        tele::GenParams p;
        if (seed) p.seed = *seed;
        p.n_users = n_users;
        p.n_cus = n_cus;
        p.days = days;
        p.daily_visits_mean = daily_visits_mean;
        tele::UsageSummary s;
        {
          py::gil_scoped_release release;
          auto data = tele::generate(p);
          tele::write_generated(out_dir, data);
          s = tele::summarize(tele::EventStore::from_events(data.events), p.window());
        }
        std::ostringstream out;
        tele::write_summary(out, s);
        return parse_json(out.str());
      },
      py::arg("out_dir"), py::arg("seed") = std::nullopt, py::arg("n_users") = 5864,
      py::arg("n_cus") = 666, py::arg("days") = 28, py::arg("daily_visits_mean") = 4000.0,
      "Write a synthetic data directory; returns its usage summary.");

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::string&, const std::vector<std::string>&>(), py::arg("data_dir"),
           py::arg("periods") = std::vector<std::string>{})
      .def_property_readonly("snapshot_id", &Engine::snapshot_id)
      .def("request", &Engine::request, py::arg("method"), py::arg("path"),
           py::arg("token") = "", py::arg("params") = std::map<std::string, std::string>{},
           py::arg("body") = "",
           "Answer an API request in process; returns (status, payload).")
      .def("rebuild", &Engine::rebuild)
      .def("cube_file", &Engine::write_cube, "The current cube in its file format.")
      .def("radar_svg", &Engine::radar_svg, py::arg("node"), py::arg("period") = 0)
      .def("levels", &Engine::levels);
}
