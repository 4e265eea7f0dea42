#include <nhd/bench.hpp>
#include <nhd/config.hpp>
#include <nhd/manufactured.hpp>
#include <nhd/mesh_io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

namespace
{
	struct RunOptions
	{
		std::string scenario = "bowtie";
		std::string metal;           // empty: scenario default
		std::vector<double> omega;   // empty: scenario frequency list
		std::optional<int> degree;   // scenario default
		double theta = 0.05;
		double rho = 0.5;
		std::optional<int> iters;    // scenario default (desk or full scale)
		double h0 = 0;
		std::string mode = "both";
		std::string out = "results";
		int jobs = 1;
		unsigned seed = 12345;
		double pml = 0.75;
		int reference_every = 1;
		bool literal_sort = false;
		bool full_scale = false;
		bool osc = false;
		std::string config;
	};

	// Config keys mirror the long flag names. Flags given on the command line win.
	void apply_config(const nhd::Config &cfg, RunOptions &o, const CLI::App &cmd)
	{
		using Setter = std::function<void(const nhd::ConfigEntry &)>;
		const std::map<std::string, Setter> setters{
			{"scenario", [&](const auto &e) { o.scenario = e.value; }},
			{"metal", [&](const auto &e) { o.metal = e.value; }},
			{"omega", [&](const auto &e) { o.omega = {cfg.as_double(e)}; }},
			{"degree", [&](const auto &e) { o.degree = cfg.as_int(e); }},
			{"theta", [&](const auto &e) { o.theta = cfg.as_double(e); }},
			{"rho", [&](const auto &e) { o.rho = cfg.as_double(e); }},
			{"iters", [&](const auto &e) { o.iters = cfg.as_int(e); }},
			{"h0", [&](const auto &e) { o.h0 = cfg.as_double(e); }},
			{"mode", [&](const auto &e) { o.mode = e.value; }},
			{"out", [&](const auto &e) { o.out = e.value; }},
			{"jobs", [&](const auto &e) { o.jobs = cfg.as_int(e); }},
			{"seed", [&](const auto &e) { o.seed = static_cast<unsigned>(cfg.as_int(e)); }},
			{"pml", [&](const auto &e) { o.pml = cfg.as_double(e); }},
			{"reference-every", [&](const auto &e) { o.reference_every = cfg.as_int(e); }},
			{"literal-sort", [&](const auto &e) { o.literal_sort = cfg.as_bool(e); }},
			{"full-scale", [&](const auto &e) { o.full_scale = cfg.as_bool(e); }},
			{"osc", [&](const auto &e) { o.osc = cfg.as_bool(e); }},
		};
		for (const auto &e : cfg.entries())
		{
			const auto it = setters.find(e.key);
			if (it == setters.end())
				cfg.fail(e, "unknown key");
			if (cmd.count("--" + e.key) == 0)
				it->second(e);
		}
	}

	void print_records(const std::string &label, const std::vector<nhd::IterationRecord> &records)
	{
		std::printf("%-9s %4s %9s %13s %13s %8s %11s\n", label.c_str(), "iter", "N_dofs", "eta", "xi", "eta/xi",
		            "backward");
		for (const auto &r : records)
			std::printf("%-9s %4d %9d %13.6e %13.6e %8.3f %11.3e\n", "", r.iteration, r.ndofs, r.eta, r.xi, r.effectivity,
			            r.backward_error);
	}

	int run(const RunOptions &o)
	{
		auto spec = nhd::scenario(o.scenario);
		if (!o.metal.empty())
		{
			spec.metal_name = o.metal;
			spec.metal_si = nhd::metal_by_name(o.metal);
		}
		nhd::ExperimentOptions eo;
		eo.mode = nhd::parse_mode(o.mode);
		eo.h0 = o.h0;
		eo.pml_strength = o.pml;
		eo.seed = o.seed;
		eo.output = o.out;
		eo.adapt.theta = o.theta;
		eo.adapt.rho = o.rho;
		eo.adapt.degree = o.degree.value_or(spec.degree);
		const int iters = o.iters.value_or(o.full_scale ? spec.full_iterations : spec.iterations);
		if (iters < 1)
			throw nhd::ContractViolation("--iters must be at least 1");
		eo.adapt.max_level = iters - 1;
		eo.adapt.literal_sort = o.literal_sort;
		eo.adapt.oscillation = o.osc;
		eo.adapt.reference_every = o.reference_every;
		eo.adapt.jobs = o.jobs;
		eo.adapt.validate();

		const auto freqs = o.omega.empty() ? spec.frequencies : o.omega;
		for (double w : freqs)
		{
			eo.omega_ratio = w;
			std::printf("%s (%s), omega = %.3g omega_P, p = %d\n", spec.name.c_str(), spec.metal_name.c_str(), w,
			            eo.adapt.degree);
			const auto result = nhd::run_experiment(spec, eo);
			if (!result.adaptive.empty())
				print_records("adaptive", result.adaptive);
			if (!result.uniform.empty())
				print_records("uniform", result.uniform);
			const auto &loc = result.localization;
			std::printf("hotspot: max|E| / median|E| = %.3f, median h near / median h = %.3f, near / away from the "
			            "metal = %.3f\n",
			            loc.field_ratio(), loc.size_ratio(), loc.size_contrast());
			for (const auto &f : result.files)
				std::printf("wrote %s\n", f.string().c_str());
		}
		return 0;
	}

	int validate(int degree, int levels, int jobs)
	{
		const auto study = nhd::manufactured_convergence(degree, levels, jobs);
		std::printf("%6s %9s %13s\n", "h", "N_dofs", "error");
		for (std::size_t i = 0; i < study.h.size(); ++i)
			std::printf("%6.4f %9d %13.6e\n", study.h[i], study.ndofs[i], study.error[i]);
		std::printf("observed order: %.3f\n", study.observed_order);
		return 0;
	}

	int write_mesh(const std::string &name, double h0, unsigned seed, const std::string &path)
	{
		const auto spec = nhd::scenario(name);
		const auto mesh = nhd::build_domain_mesh(spec.domain(), h0 > 0 ? h0 : spec.h0, seed);
		nhd::write_vtk(path, mesh);
		std::printf("%d triangles, %d vertices -> %s\n", mesh.num_triangles(), mesh.num_vertices(), path.c_str());
		return 0;
	}
} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Adaptive finite elements for Maxwell's equations with the hydrodynamic Drude model"};
	app.require_subcommand(1);

	RunOptions ro;
	auto *run_cmd = app.add_subcommand("run", "adaptive and/or uniform runs of a benchmark scenario");
	run_cmd->add_option("--scenario", ro.scenario, "bowtie | nanotip | vgroove")->capture_default_str();
	run_cmd->add_option("--metal", ro.metal, "gold | silver (default: the scenario's metal)");
	run_cmd->add_option("--omega", ro.omega, "frequencies as multiples of omega_P (default: the scenario list)");
	run_cmd->add_option("--degree", ro.degree, "polynomial degree p (default: scenario)");
	run_cmd->add_option("--theta", ro.theta, "marking fraction")->capture_default_str();
	run_cmd->add_option("--rho", ro.rho, "size reduction factor for marked vertices")->capture_default_str();
	run_cmd->add_option("--iters", ro.iters, "solves per run (default: scenario desk scale)");
	run_cmd->add_option("--h0", ro.h0, "initial mesh size in nm (default: scenario)");
	run_cmd->add_option("--mode", ro.mode, "adaptive | uniform | both")->capture_default_str();
	run_cmd->add_option("--out", ro.out, "output directory")->capture_default_str();
	run_cmd->add_option("--jobs", ro.jobs, "worker threads for element loops")->capture_default_str();
	run_cmd->add_option("--seed", ro.seed, "initial mesh jitter seed")->capture_default_str();
	run_cmd->add_option("--pml", ro.pml, "absorbing layer strength s in d = 1 - i s")->capture_default_str();
	run_cmd->add_option("--reference-every", ro.reference_every,
	                    "reference error every n iterations, the last one always (0: never)")
		->capture_default_str();
	run_cmd->add_option("--config", ro.config, "key = value file; keys are the long flag names");
	run_cmd->add_flag("--literal-sort", ro.literal_sort, "mark vertices smallest estimator first");
	run_cmd->add_flag("--full-scale", ro.full_scale, "use the original iteration counts (80 / 50 / 50)");
	run_cmd->add_flag("--osc", ro.osc, "compute data oscillation terms");

	bool manufactured = false;
	int v_degree = 1, v_levels = 4, v_jobs = 1;
	auto *val_cmd = app.add_subcommand("validate", "convergence order on a manufactured solution");
	val_cmd->add_flag("--manufactured", manufactured, "use the built-in manufactured problem")->required();
	val_cmd->add_option("--degree", v_degree, "polynomial degree p")->capture_default_str();
	val_cmd->add_option("--levels", v_levels, "uniform refinements")->capture_default_str();
	val_cmd->add_option("--jobs", v_jobs, "worker threads")->capture_default_str();

	std::string m_scenario = "bowtie", m_out = "mesh.vtk";
	double m_h0 = 0;
	unsigned m_seed = 12345;
	auto *mesh_cmd = app.add_subcommand("mesh", "write the initial mesh of a scenario as VTK");
	mesh_cmd->add_option("--scenario", m_scenario, "bowtie | nanotip | vgroove")->capture_default_str();
	mesh_cmd->add_option("--h0", m_h0, "mesh size in nm (default: scenario)");
	mesh_cmd->add_option("--seed", m_seed, "lattice jitter seed")->capture_default_str();
	mesh_cmd->add_option("--out", m_out, "output file")->capture_default_str();

	CLI11_PARSE(app, argc, argv);

	try
	{
		if (*run_cmd)
		{
			if (!ro.config.empty())
				apply_config(nhd::Config::load(ro.config), ro, *run_cmd);
			return run(ro);
		}
		if (*val_cmd)
			return validate(v_degree, v_levels, v_jobs);
		return write_mesh(m_scenario, m_h0, m_seed, m_out);
	}
	catch (const std::exception &e)
	{
		std::cerr << "nhdfem: " << e.what() << '\n';
		return 1;
	}
}
