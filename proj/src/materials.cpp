#include <nhd/materials.hpp>

#include <cmath>

namespace nhd
{
	DrudeParams gold() { return {1.390e16, 3.230e13, 1.084e6}; }
	DrudeParams silver() { return {1.339e16, 1.143e14, 1.465e6}; }

	DrudeParams metal_by_name(const std::string &name)
	{
		if (name == "gold")
			return gold();
		if (name == "silver")
			return silver();
		throw Error("unknown metal '" + name + "' (expected gold or silver)");
	}

	double VacuumConstants::light_speed() const { return 1.0 / std::sqrt(eps0 * mu0); }

	VacuumConstants UnitSystem::vacuum() const
	{
		const VacuumConstants si;
		const double c = si.light_speed() / (length * frequency);
		return {1.0, 1.0 / (c * c)};
	}

	DrudeParams UnitSystem::scale(const DrudeParams &si) const
	{
		return {si.plasma_frequency / frequency, si.damping / frequency, si.fermi_velocity / (length * frequency)};
	}

	NhdCoefficients nhd_coefficients(const DrudeParams &params, double omega, const VacuumConstants &vacuum)
	{
		if (!(omega > 0))
			throw Error("angular frequency must be positive");
		const double wp2e0 = params.plasma_frequency * params.plasma_frequency * vacuum.eps0;
		const Complex a = (1.0 - params.damping / (Complex(0, 1) * omega)) / wp2e0;
		return {a * CMat2::Identity(), Complex(0.6 * params.fermi_velocity * params.fermi_velocity / wp2e0, 0.0)};
	}

	Eigen::Vector2cd pml_stretch(const Vec2 &x, double L, double strength)
	{
		Eigen::Vector2cd d;
		for (int j = 0; j < 2; ++j)
			d(j) = std::abs(x(j)) > L ? Complex(1.0, -strength) : Complex(1.0, 0.0);
		return d;
	}

	PmlCoefficients apply_pml(const CMat2 &eps, Complex chi, const Vec2 &x, double L, double strength)
	{
		if (std::abs(eps(0, 1)) != 0.0 || std::abs(eps(1, 0)) != 0.0)
			throw ContractViolation("absorbing layer requires a diagonal permittivity");
		const auto d = pml_stretch(x, L, strength);
		CMat2 s = CMat2::Zero();
		s(0, 0) = d(1) / d(0);
		s(1, 1) = d(0) / d(1);
		return {s * eps, chi / (d(0) * d(1))};
	}

	void ElementCoefficients::update_stars()
	{
		eps_star = star_value(eps);
		chi_star = std::abs(chi);
		alpha_star = star_value(alpha);
		zeta_star = std::abs(zeta);
	}

	CoefficientField build_coefficients(const Mesh2D &mesh, const PhysicalSetup &setup)
	{
		CoefficientField field;
		field.omega = setup.omega;
		field.plasma_frequency = setup.metal.plasma_frequency;
		field.elements.resize(mesh.num_triangles());

		const CMat2 eps0 = setup.vacuum.eps0 * CMat2::Identity();
		const Complex chi0 = 1.0 / setup.vacuum.mu0;
		const bool has_metal = mesh.num_metal_triangles() > 0;
		const NhdCoefficients nhd = has_metal ? nhd_coefficients(setup.metal, setup.omega, setup.vacuum)
		                                      : NhdCoefficients{CMat2::Zero(), 0.0};

		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			ElementCoefficients &c = field.elements[t];
			c.eps = eps0;
			c.chi = chi0;
			if (mesh.region(t) == Region::PML && setup.pml_strength > 0)
			{
				const auto m = apply_pml(eps0, chi0, mesh.geometry(t).barycenter, setup.pml_half_width, setup.pml_strength);
				c.eps = m.eps;
				c.chi = m.chi;
			}
			if (mesh.is_metal(t))
			{
				c.alpha = nhd.alpha;
				c.zeta = nhd.zeta;
			}
			c.update_stars();
		}
		return field;
	}

	Wavenumbers wavenumbers(const ElementCoefficients &c, double omega, double plasma_frequency, bool metal)
	{
		Wavenumbers w;
		w.c_e = std::sqrt(c.chi_star / c.eps_star);
		w.k_e = omega / w.c_e;
		if (metal)
		{
			w.c_j = std::sqrt(c.zeta_star / c.alpha_star);
			w.k_j = omega / w.c_j;
			w.c_p = plasma_frequency * std::sqrt(c.zeta_star * c.eps_star);
			w.k_p = plasma_frequency / w.c_p;
		}
		return w;
	}

	std::vector<Wavenumbers> wavenumbers(const Mesh2D &mesh, const CoefficientField &field)
	{
		std::vector<Wavenumbers> out(mesh.num_triangles());
		for (int t = 0; t < mesh.num_triangles(); ++t)
			out[t] = wavenumbers(field[t], field.omega, field.plasma_frequency, mesh.is_metal(t));
		return out;
	}
} // namespace nhd
