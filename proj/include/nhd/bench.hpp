#pragma once

#include "adapt.hpp"
#include "meshgen.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nhd
{
	struct ScenarioSpec
	{
		std::string name;
		std::vector<Polygon> metal;
		std::string metal_name; ///< gold | silver
		DrudeParams metal_si;
		double half_width = 6; ///< L
		double layer = 4;      ///< absorbing frame width
		double incidence = 0;  ///< d = (cos, sin), p = (-sin, cos)
		std::vector<double> frequencies; ///< multiples of omega_P
		int degree = 1;
		int iterations = 1;      ///< desk-scale solves per adaptive run
		int full_iterations = 1; ///< solves per run in the original study
		double h0 = 1.0;         ///< initial mesh size (nm)
		Vec2 hotspot = Vec2::Zero(); ///< where the field or the refinement concentrates

		DomainGeometry domain() const { return {metal, half_width, layer}; }
	};

	/// "bowtie" (gold), "nanotip" (silver) or "vgroove" (gold).
	ScenarioSpec scenario(const std::string &name);
	std::vector<std::string> scenario_names();

	/// Scenario physics in units of 1 nm and omega_P (eps0 = 1): Drude-NHD metal,
	/// vacuum elsewhere, absorbing frame, plane-wave drive on the metal.
	Problem make_problem(const ScenarioSpec &spec, double omega_ratio, double pml_strength = 0.75);

	/// Plane wave of the scenario in the same units.
	PlaneWave incident_wave(const ScenarioSpec &spec, double omega_ratio);

	enum class RunMode
	{
		Adaptive,
		Uniform,
		Both
	};
	RunMode parse_mode(const std::string &s);

	struct ExperimentOptions
	{
		double omega_ratio = 1.0;
		RunMode mode = RunMode::Both;
		AdaptConfig adapt; ///< degree and max_level are taken from here
		double h0 = 0;     ///< 0: scenario default
		double pml_strength = 0.75;
		unsigned seed = 12345; ///< initial mesh jitter
		std::filesystem::path output; ///< empty: no files
	};

	/// Field concentration and local refinement measures of one run.
	struct LocalizationReport
	{
		double hotspot_max_field = 0; ///< max vertex |E_h| within 1 nm of the hotspot
		double median_field = 0;      ///< median vertex |E_h| over the physical box
		double hotspot_median_h = 0;  ///< median h_K within 1 nm of the hotspot
		double median_h = 0;          ///< median h_K over the physical box
		double far_median_h = 0;      ///< median h_K in the box farther than `radius` from the metal

		double field_ratio() const { return hotspot_max_field / median_field; }
		double size_ratio() const { return hotspot_median_h / median_h; }
		double size_contrast() const { return hotspot_median_h / far_median_h; }
	};

	LocalizationReport localization(const SolutionPair &u, const ScenarioSpec &spec, double radius = 1.0);

	struct ExperimentResult
	{
		std::vector<IterationRecord> adaptive;
		std::vector<IterationRecord> uniform;
		LocalizationReport localization; ///< finest adaptive (else uniform) mesh
		std::vector<std::filesystem::path> files;
	};

	/// Adaptive and/or uniform runs of one scenario at one frequency. With an
	/// output directory, writes <tag>_convergence.csv (labelled curves),
	/// <tag>_elements.csv and <tag>_field.vtk for the finest adaptive mesh,
	/// where tag = <name>_w<omega ratio>.
	ExperimentResult run_experiment(const ScenarioSpec &spec, const ExperimentOptions &options);
} // namespace nhd
