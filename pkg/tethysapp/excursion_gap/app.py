from tethys_sdk.base import TethysAppBase, url_map_maker
from tethys_sdk.app_settings import CustomSetting, PersistentStoreDatabaseSetting


class ExcursionGap(TethysAppBase):
    """
    Tethys app class for Excursion Gap.
    """

    name = 'Excursion Gap'
    index = 'excursion_gap:home'
    package = 'excursion_gap'
    root_url = 'excursion-gap'
    color = '#004d99'
    description = 'Exact analysis of the gap between on-policy and excursion objectives in tabular MDPs.'
    tags = 'Reinforcement Learning, Off-Policy, Markov Chains'
    enable_feedback = False
    feedback_emails = []

    def url_maps(self):
        """
        Add controllers
        """
        UrlMap = url_map_maker(self.root_url)

        url_maps = (
            UrlMap(
                name='home',
                url='excursion-gap',
                controller='excursion_gap.controllers.home'
            ),
            UrlMap(
                name='ajax_chain_report',
                url='excursion-gap/ajax/chain-report',
                controller='excursion_gap.ajax_controllers.chain_report'
            ),
            UrlMap(
                name='ajax_gap_sweep',
                url='excursion-gap/ajax/gap-sweep',
                controller='excursion_gap.ajax_controllers.gap_sweep'
            ),
            UrlMap(
                name='ajax_bounds_check',
                url='excursion-gap/ajax/bounds-check',
                controller='excursion_gap.ajax_controllers.bounds_check'
            ),
            UrlMap(
                name='ajax_get_run_rows',
                url='excursion-gap/ajax/get-run-rows',
                controller='excursion_gap.ajax_controllers.get_run_rows'
            ),
            UrlMap(
                name='ajax_remove_run',
                url='excursion-gap/ajax/remove-run',
                controller='excursion_gap.ajax_controllers.remove_run'
            ),
        )

        return url_maps


    def custom_settings(self):
        custom_settings = (
            CustomSetting(
                name='epsilon_chain',
                type=CustomSetting.TYPE_FLOAT,
                description='Chain analysis tolerance',
                required=False
            ),
            CustomSetting(
                name='t_max',
                type=CustomSetting.TYPE_INTEGER,
                description='Iteration cap for chain analysis',
                required=False
            ),
            CustomSetting(
                name='default_seed',
                type=CustomSetting.TYPE_INTEGER,
                description='Seed used when a request does not give one',
                required=False
            ),
        )

        return custom_settings


    def persistent_store_settings(self):
        ps_settings = (
            PersistentStoreDatabaseSetting(
                name='excursion_gap',
                description='Excursion Gap Results Database',
                initializer='excursion_gap.model.init_excursion_gap_db',
                required=True
            ),
        )

        return ps_settings
