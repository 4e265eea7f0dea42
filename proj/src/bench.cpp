#include <nhd/bench.hpp>
#include <nhd/mesh_io.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace nhd
{
	ScenarioSpec scenario(const std::string &name)
	{
		ScenarioSpec s;
		s.name = name;
		if (name == "bowtie")
		{
			s.metal = {{{-3, 3}, {-3, -3}, {-0.25, -0.25}, {0.25, -0.25}, {3, -3}, {3, 3}, {0.25, 0.25}, {-0.25, 0.25}}};
			s.metal_name = "gold";
			s.incidence = pi / 3;
			s.frequencies = {0.8, 0.9, 1.0};
			s.degree = 1;
			s.iterations = 25;
			s.full_iterations = 80;
			s.h0 = 1.5;
			s.hotspot = Vec2(0, 0);
		}
		else if (name == "nanotip")
		{
			s.metal = {{{-3, -1}, {3, 0}, {-3, 1}}};
			s.metal_name = "silver";
			s.incidence = 0;
			s.frequencies = {0.7, 1.0, 1.3};
			s.degree = 2;
			s.iterations = 20;
			s.full_iterations = 50;
			s.h0 = 1.5;
			s.hotspot = Vec2(3, 0);
		}
		else if (name == "vgroove")
		{
			s.metal = {{{-4, -1}, {-4, 1}, {-0.5, 1}, {0, 0}, {0.5, 1}, {4, 1}, {4, -1}}};
			s.metal_name = "gold";
			s.incidence = pi / 3;
			s.frequencies = {0.8, 0.9, 1.0};
			s.degree = 3;
			s.iterations = 12;
			s.full_iterations = 50;
			s.h0 = 2.0;
			s.hotspot = Vec2(0, 0.5);
		}
		else
			throw Error("unknown scenario '" + name + "' (expected bowtie, nanotip or vgroove)");
		s.metal_si = metal_by_name(s.metal_name);
		return s;
	}

	std::vector<std::string> scenario_names() { return {"bowtie", "nanotip", "vgroove"}; }

	namespace
	{
		UnitSystem units_of(const ScenarioSpec &spec) { return {1e-9, spec.metal_si.plasma_frequency}; }
	} // namespace

	PlaneWave incident_wave(const ScenarioSpec &spec, double omega_ratio)
	{
		const auto vac = units_of(spec).vacuum();
		const double k = omega_ratio / vac.light_speed();
		const double c = std::cos(spec.incidence), s = std::sin(spec.incidence);
		return PlaneWave(Vec2(-s, c), Vec2(c, s), k);
	}

	Problem make_problem(const ScenarioSpec &spec, double omega_ratio, double pml_strength)
	{
		if (!(omega_ratio > 0))
			throw Error("frequency must be positive");
		const auto units = units_of(spec);
		PhysicalSetup setup;
		setup.metal = units.scale(spec.metal_si);
		setup.vacuum = units.vacuum();
		setup.omega = omega_ratio;
		setup.pml_half_width = spec.half_width;
		setup.pml_strength = pml_strength;

		Problem p;
		p.coefficients = [setup](const Mesh2D &mesh) { return build_coefficients(mesh, setup); };
		p.sources = scattering_sources(incident_wave(spec, omega_ratio));
		return p;
	}

	RunMode parse_mode(const std::string &s)
	{
		if (s == "adaptive")
			return RunMode::Adaptive;
		if (s == "uniform")
			return RunMode::Uniform;
		if (s == "both")
			return RunMode::Both;
		throw Error("unknown mode '" + s + "' (expected adaptive, uniform or both)");
	}

	namespace
	{
		double median(std::vector<double> v)
		{
			if (v.empty())
				return 0.0;
			const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
			std::nth_element(v.begin(), mid, v.end());
			return *mid;
		}

		// What the output files need from the latest iteration.
		struct Snapshot
		{
			Mesh2D mesh;
			std::vector<double> field;
			EstimatorBreakdown estimate;
			std::vector<double> xi;
			LocalizationReport localization;
		};

		std::string tag_of(const ScenarioSpec &spec, double omega_ratio)
		{
			std::ostringstream s;
			s << spec.name << "_w" << std::fixed << std::setprecision(2) << omega_ratio;
			return s.str();
		}
	} // namespace

	LocalizationReport localization(const SolutionPair &u, const ScenarioSpec &spec, double radius)
	{
		const Mesh2D &mesh = u.mesh();
		const auto field = u.vertex_field_magnitude();
		LocalizationReport r;
		std::vector<double> box_field, box_h, hot_h, far_h;
		auto metal_distance = [&](const Vec2 &x) {
			double d = INFINITY;
			for (const auto &poly : spec.metal)
				for (std::size_t i = 0; i < poly.size(); ++i)
				{
					const Vec2 a = poly[i], e = poly[(i + 1) % poly.size()] - a;
					const double s = std::clamp((x - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
					d = std::min(d, (x - a - s * e).norm());
				}
			return d;
		};
		for (int v = 0; v < mesh.num_vertices(); ++v)
		{
			const Vec2 &x = mesh.vertex(v);
			if (x.cwiseAbs().maxCoeff() <= spec.half_width)
				box_field.push_back(field[v]);
			if ((x - spec.hotspot).norm() <= radius)
				r.hotspot_max_field = std::max(r.hotspot_max_field, field[v]);
		}
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			if (mesh.region(t) != Region::PML)
			{
				box_h.push_back(g.diameter);
				if (metal_distance(g.barycenter) > radius)
					far_h.push_back(g.diameter);
			}
			if ((g.barycenter - spec.hotspot).norm() <= radius)
				hot_h.push_back(g.diameter);
		}
		r.median_field = median(box_field);
		r.median_h = median(box_h);
		r.hotspot_median_h = median(hot_h);
		r.far_median_h = median(far_h);
		return r;
	}

	ExperimentResult run_experiment(const ScenarioSpec &spec, const ExperimentOptions &options)
	{
		const double h0 = options.h0 > 0 ? options.h0 : spec.h0;
		const Mesh2D initial = build_domain_mesh(spec.domain(), h0, options.seed);
		const Problem problem = make_problem(spec, options.omega_ratio, options.pml_strength);

		ExperimentResult result;
		std::optional<Snapshot> last;
		auto keep = [&](const IterationState &s) {
			Snapshot snap{s.mesh, s.solution.vertex_field_magnitude(), s.estimate, {}, localization(s.solution, spec)};
			if (s.error)
				snap.xi = s.error->xi_k;
			last = std::move(snap);
		};

		if (options.mode != RunMode::Uniform)
			result.adaptive = adaptive_loop(initial, problem, options.adapt, keep);
		if (last)
			result.localization = last->localization;

		if (options.mode != RunMode::Adaptive)
		{
			int target = std::numeric_limits<int>::max();
			if (!result.adaptive.empty())
				target = result.adaptive.back().ndofs;
			AdaptConfig uc = options.adapt;
			if (target != std::numeric_limits<int>::max())
				uc.max_level = std::max(uc.max_level, 64);
			std::optional<Snapshot> adaptive_last = std::move(last);
			last.reset();
			result.uniform = uniform_loop(initial, problem, uc, target, keep);
			if (adaptive_last)
				last = std::move(adaptive_last);
			else
				result.localization = last->localization;
		}

		if (!options.output.empty())
		{
			std::filesystem::create_directories(options.output);
			const std::string tag = tag_of(spec, options.omega_ratio);
			const auto csv = options.output / (tag + "_convergence.csv");
			std::ofstream out(csv);
			if (!out)
				throw Error("cannot write " + csv.string());
			bool header = true;
			if (!result.adaptive.empty())
			{
				write_convergence_csv(out, result.adaptive, "adaptive", header);
				header = false;
			}
			if (!result.uniform.empty())
				write_convergence_csv(out, result.uniform, "uniform", header);
			result.files.push_back(csv);

			if (last)
			{
				const auto elements = options.output / (tag + "_elements.csv");
				std::ofstream eo(elements);
				write_element_csv(eo, last->mesh, last->estimate, last->xi);
				result.files.push_back(elements);

				const auto vtk = options.output / (tag + "_field.vtk");
				std::vector<NamedField> cells{{"eta", last->estimate.eta_k()}};
				if (!last->xi.empty())
					cells.emplace_back("xi", last->xi);
				write_vtk(vtk.string(), last->mesh, {{"E_magnitude", last->field}}, cells);
				result.files.push_back(vtk);
			}
		}
		return result;
	}
} // namespace nhd
