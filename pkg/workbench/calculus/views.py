"""Views for calculus

A small JSON surface over the recorded runs and the electoral checker.
"""
import logging

from django.http import JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.csrf import csrf_exempt
from django.views.decorators.http import require_GET, require_POST

from .electoral import is_electoral
from .errors import WorkbenchError
from .forms import ExploreBoundsForm, NetworkForm, form_errors
from .models import Run
# pylint: disable=no-member

logger = logging.getLogger(__name__)


@require_GET
def runs(request):
    """Lists recorded runs, newest first.

    Query parameters:
        kind (str, optional): Only runs of this kind.
        limit (int, optional): At most this many runs (default 50).
    """
    queryset = Run.objects.all()
    if request.GET.get('kind'):
        queryset = queryset.filter(kind=request.GET['kind'])
    try:
        limit = max(1, int(request.GET.get('limit', 50)))
    except ValueError:
        return JsonResponse({'error': 'limit must be an integer'}, status=400)
    return JsonResponse({'runs': [run.to_json() for run in queryset[:limit]]})


@require_GET
def run_detail(request, run_id):
    run = get_object_or_404(Run, id=run_id)
    return JsonResponse(run.to_json())


@csrf_exempt
@require_POST
def elect(request):
    """Runs the electoral checker on a submitted network and records the run.

    Args:
        request (HttpRequest): POST with `text`, optional `dialect` and the
            optional bounds `depth`, `unfold`, `states`.

    Returns:
        JsonResponse: the verdict and the id of the recorded run, or status 400
        with the form errors.
    """
    network_form = NetworkForm(request.POST)
    bounds_form = ExploreBoundsForm(request.POST)
    if not network_form.is_valid() or not bounds_form.is_valid():
        errors = "; ".join(filter(None, (form_errors(network_form), form_errors(bounds_form))))
        return JsonResponse({'error': errors}, status=400)

    net = network_form.cleaned_data['network']
    dialect = network_form.cleaned_data['dialect']
    try:
        verdict = is_electoral(net, dialect, bounds_form.bounds())
    except WorkbenchError as err:
        return JsonResponse({'error': str(err)}, status=400)

    run = Run.objects.create(kind=Run.Kind.ELECT, dialect=dialect.value,
                             source=net.to_text(), verdict=verdict.to_json())
    logger.info("recorded elect run %s: %s", run.id, run.outcome)
    return JsonResponse({'run': run.id, **verdict.to_json()})
