from django.shortcuts import render
from .app import ExcursionGap as app
from .config import DEFAULT_EPSILON, DEFAULT_SEED, DEFAULT_T_MAX
from .model import get_analysis_runs


def get_setting(name, default):
    value = app.get_custom_setting(name)
    return default if value is None else value


def get_store_session():
    return app.get_persistent_store_database("excursion_gap", as_sessionmaker=True)


def home(request):
    """
    Controller for the app home page.

    Lists recorded runs, newest first. GET requests may filter by subcommand with
    the "subcommand" query parameter.
    """

    subcommand = request.GET.get("subcommand")
    runs = get_analysis_runs(get_store_session(), subcommand=subcommand)

    context = {
        "runs": runs,
        "subcommand": subcommand,
        "epsilon_chain": get_setting("epsilon_chain", DEFAULT_EPSILON),
        "t_max": get_setting("t_max", DEFAULT_T_MAX),
        "default_seed": get_setting("default_seed", DEFAULT_SEED),
    }

    return render(request, 'excursion_gap/home.html', context)
