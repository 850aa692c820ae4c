from django.contrib import admin
from .models import Run


@admin.register(Run)
class RunAdmin(admin.ModelAdmin):
    list_display = ('id', 'kind', 'dialect', 'outcome', 'created')
    list_filter = ('kind', 'dialect')
    search_fields = ('source',)
