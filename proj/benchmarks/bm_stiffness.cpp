// Element-matrix formation cost of the smoothing schemes; the point-count
// ratio is fixed by construction, the wall-time ratio is what these measure.

#include "polyls/problems.hpp"
#include "polyls/smoothing.hpp"
#include "polyls/voronoi.hpp"
#include "polyls/wachspress.hpp"

#include <benchmark/benchmark.h>

using namespace polyls;

namespace {

Scheme scheme_of(int64_t i) { return i == 0 ? Scheme::CS : i == 1 ? Scheme::LS3n : Scheme::LS1; }

void BM_ElementStiffness2D(benchmark::State& state)
{
    const ElementGeometry elem = demo_hexagon();
    const WachspressBasis basis(elem);
    const Material mat = Material::plane_stress(1.0, 0.3);
    const Scheme scheme = scheme_of(state.range(0));
    for (auto _ : state) {
        auto es = element_stiffness(elem, basis, mat, scheme);
        benchmark::DoNotOptimize(es.K.data());
    }
}
BENCHMARK(BM_ElementStiffness2D)->Arg(0)->Arg(1)->Arg(2);

void BM_ElementStiffness3D(benchmark::State& state)
{
    const ElementGeometry elem = demo_hexahedron();
    const WachspressBasis basis(elem);
    const Material mat = Material::isotropic_3d(1.0, 0.3);
    const Scheme scheme = scheme_of(state.range(0));
    for (auto _ : state) {
        auto es = element_stiffness(elem, basis, mat, scheme);
        benchmark::DoNotOptimize(es.K.data());
    }
}
BENCHMARK(BM_ElementStiffness3D)->Arg(1)->Arg(2);

void BM_Assemble2D(benchmark::State& state)
{
    const Domain dom = Domain::box_2d(Vec3(0, 0, 0), Vec3(1, 1, 0));
    const PolytopeMesh mesh = generate_cvt_mesh(dom, 100, 20, 5);
    const Material mat = Material::plane_stress(1.0, 0.3);
    const Scheme scheme = scheme_of(state.range(0));
    for (auto _ : state) {
        const GlobalSystem sys = assemble(mesh, mat, scheme, nullptr, BoundaryCondition{});
        benchmark::DoNotOptimize(sys.f.data());
    }
}
BENCHMARK(BM_Assemble2D)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_WachspressEval(benchmark::State& state)
{
    const ElementGeometry elem = state.range(0) == 2
                                     ? demo_heptagon()
                                     : static_cast<const ElementGeometry&>(demo_hexahedron());
    const WachspressBasis basis(elem);
    const Vec3 x = elem.vertex_mean();
    BasisEval be;
    for (auto _ : state) {
        basis.eval(x, be);
        benchmark::DoNotOptimize(be.values.data());
    }
}
BENCHMARK(BM_WachspressEval)->Arg(2)->Arg(3);

} // namespace
