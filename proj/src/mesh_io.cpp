#include <nhd/mesh_io.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nhd
{
	void write_vtk(std::ostream &os, const Mesh2D &mesh, const std::vector<NamedField> &point_data,
	               const std::vector<NamedField> &cell_data)
	{
		const int nv = mesh.num_vertices(), nt = mesh.num_triangles();
		os << "# vtk DataFile Version 3.0\n"
		   << "nhdfem triangle mesh\n"
		   << "ASCII\n"
		   << "DATASET UNSTRUCTURED_GRID\n";
		os << std::setprecision(17);
		os << "POINTS " << nv << " double\n";
		for (const auto &v : mesh.vertices())
			os << v(0) << ' ' << v(1) << " 0\n";
		os << "CELLS " << nt << ' ' << 4 * nt << '\n';
		for (const auto &t : mesh.triangles())
			os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
		os << "CELL_TYPES " << nt << '\n';
		for (int t = 0; t < nt; ++t)
			os << "5\n";

		os << "CELL_DATA " << nt << '\n';
		os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
		for (Region r : mesh.regions())
			os << static_cast<int>(r) << '\n';
		for (const auto &[name, values] : cell_data)
		{
			if (static_cast<int>(values.size()) != nt)
				throw Error("cell field '" + name + "' has the wrong length");
			os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
			for (double v : values)
				os << v << '\n';
		}
		if (!point_data.empty())
		{
			os << "POINT_DATA " << nv << '\n';
			for (const auto &[name, values] : point_data)
			{
				if (static_cast<int>(values.size()) != nv)
					throw Error("point field '" + name + "' has the wrong length");
				os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
				for (double v : values)
					os << v << '\n';
			}
		}
	}

	void write_vtk(const std::string &path, const Mesh2D &mesh, const std::vector<NamedField> &point_data,
	               const std::vector<NamedField> &cell_data)
	{
		std::ofstream os(path);
		if (!os)
			throw Error("cannot open '" + path + "' for writing");
		write_vtk(os, mesh, point_data, cell_data);
	}

	Mesh2D read_vtk(std::istream &is)
	{
		std::vector<Vec2> vertices;
		std::vector<Mesh2D::Triangle> triangles;
		std::vector<Region> regions;

		std::string word;
		while (is >> word)
		{
			if (word == "POINTS")
			{
				int n;
				std::string type;
				is >> n >> type;
				vertices.resize(n);
				for (auto &v : vertices)
				{
					double z;
					is >> v(0) >> v(1) >> z;
				}
			}
			else if (word == "CELLS")
			{
				int n, total;
				is >> n >> total;
				triangles.resize(n);
				for (auto &t : triangles)
				{
					int k;
					is >> k;
					if (k != 3)
						throw Error("only triangle cells are supported");
					is >> t[0] >> t[1] >> t[2];
				}
			}
			else if (word == "SCALARS")
			{
				std::string name, type, lut, lutname;
				int comps;
				is >> name >> type >> comps >> lut >> lutname;
				if (name == "region")
				{
					regions.resize(triangles.size());
					for (auto &r : regions)
					{
						int v;
						is >> v;
						if (v < 0 || v > 2)
							throw Error("invalid region tag " + std::to_string(v));
						r = static_cast<Region>(v);
					}
				}
			}
			if (!is)
				throw Error("malformed VTK input");
		}
		if (regions.empty())
			regions.assign(triangles.size(), Region::Vacuum);
		return Mesh2D(std::move(vertices), std::move(triangles), std::move(regions));
	}

	Mesh2D read_vtk(const std::string &path)
	{
		std::ifstream is(path);
		if (!is)
			throw Error("cannot open '" + path + "'");
		return read_vtk(is);
	}
} // namespace nhd
